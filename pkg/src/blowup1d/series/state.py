"""Order-by-order construction of F = sum a^n F_n, lambda = sum a^n lambda_n.

Collecting powers of a in the profile equation

    F + (1 + lambda) w F' + 2 F HF - a K[F] F' = 0,   K[F] = w^(1-n) int_0^w H~F t^(n-1) dt,

gives L F_n = G_n - lambda_n w F0' with

    G_n = sum_{j<n} K[F_j] F'_{n-1-j} - sum_{0<j<n} lambda_j w F'_{n-j} - 2 sum_{0<j<n} F_j H F_{n-j}.

All arithmetic happens in w on the Chebyshev half-line grid; the smooth branch
is the case n = 1 (odd functions on the line, restricted to w = z >= 0).
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from ..exact import ProfilePair
from ..funcspace import (HalfLineFunction, LineFunction, hilbert_alpha, sobolev_norm_tilde,
                         weighted_average_lambda)
from .majorant import majorant_radius
from .operators import Branch, ConsistencyError, consistency_value, invert_L

N_MAX = 12
BREAKDOWN_FACTOR = 10.0
RADIUS_SAFETY = 0.5
SOLVABILITY_TOL = 1e-8
FIT_WINDOW = (20.0, 200.0)


@dataclass(frozen=True, eq=False)
class SeriesState:
    branch: Branch
    F: tuple = ()
    HF: tuple = ()
    lambdas: tuple = (0.0,)  # lambda_0 = 0
    mus: tuple = ()
    majorant: tuple = ()
    radius_estimate: float = np.inf
    stopped: str = ""
    _K: tuple = field(default=(), repr=False)
    _dF: tuple = field(default=(), repr=False)

    @property
    def order(self) -> int:
        """Highest n with F_n built."""
        return len(self.F) - 1

    @property
    def alpha(self) -> Fraction:
        return Fraction(1, self.branch.n)

    @property
    def grid(self):
        f = self.F[0]
        return f.size, f.map_scale

    @property
    def w(self):
        return self.F[0].w


def new_state(branch="smooth", N: int = 256, map_scale: float = 1.0) -> SeriesState:
    """State holding only the a = 0 profile F0."""
    br = Branch.parse(branch)
    br = Branch(br.n, True)
    F0 = HalfLineFunction.from_function(br.f0, br.n, N, map_scale)
    HF0 = HalfLineFunction.from_function(br.hf0, br.n, N, map_scale)
    K0 = weighted_average_lambda(br.n, F0)
    return SeriesState(br, (F0,), (HF0,), (0.0,), (_mu(br, F0),), (), np.inf, "",
                       (K0,), (F0.derivative(),))


def _mu(branch, f):
    # on the smooth branch report the full-line norm of the odd extension
    m = sobolev_norm_tilde(f, 3)
    return float(m * np.sqrt(2) if branch.n == 1 else m)


def _kernel_element(state):
    return HalfLineFunction.from_function(state.branch.kernel_element, state.branch.n, *state.grid)


def build_rhs(state: SeriesState, n: int):
    """(G_n, H G_n) from F_0..F_{n-1}; the lambda_n term is left out."""
    if n < 1:
        raise ValueError("n must be positive")
    if state.order < n - 1:
        raise ValueError(f"need F_0..F_{n - 1}, have F_0..F_{state.order}")
    F, HF, K, dF, lam = state.F, state.HF, state._K, state._dF, state.lambdas
    w = state.w
    g = np.zeros_like(w)
    for j in range(n):
        g += K[j].values * dF[n - 1 - j].values
    for j in range(1, n):
        g -= lam[j] * w * dF[n - j].values
        g -= 2 * F[j].values * HF[n - j].values
    G = HalfLineFunction.like(F[0], g)
    return G, hilbert_alpha(state.branch.n, G, strict=False)


def select_lambda(state: SeriesState, n: int, G, HG) -> float:
    """lambda_n with ell(G_n - lambda_n w F0') = 0; ell(w F0') = sin(alpha pi / 2)."""
    lam = consistency_value(state.branch, G, HG) / state.branch.sin
    k = _kernel_element(state)
    hk = hilbert_alpha(state.branch.n, k, strict=False)
    resid = consistency_value(state.branch, G - lam * k, HG - lam * hk)
    if abs(resid) > SOLVABILITY_TOL * (1 + float(np.max(np.abs(G.values)))):
        raise ConsistencyError(resid, SOLVABILITY_TOL)
    return float(lam)


def _zeta(mus):
    # mu_n measured in units of mu_0: the majorant's bilinear constant is taken
    # as 1 / ||F0||, the scale at which the quadratic terms enter the recursion
    return np.asarray(mus[1:], float) / mus[0]


def _radius(state_mus, zeta1):
    _, r = majorant_radius(zeta1, 1)
    mus = _zeta(state_mus)
    if mus.size >= 2:
        roots = mus ** (1.0 / np.arange(1, mus.size + 1))
        r = min(r, 1.0 / float(np.max(roots[mus.size // 2:])))
    return r


def extend(state: SeriesState, n_max: int = N_MAX) -> SeriesState:
    """Append (F_n, lambda_n, mu_n) for n = order + 1, unless a stop rule fires."""
    if state.stopped:
        return state
    n = state.order + 1
    if n > n_max:
        return replace(state, stopped=f"reached n_max = {n_max}")
    G, HG = build_rhs(state, n)
    lam = select_lambda(state, n, G, HG)
    k = _kernel_element(state)
    hk = hilbert_alpha(state.branch.n, k, strict=False)
    Fn, HFn = invert_L(state.branch, G - lam * k, HG - lam * hk, return_transform=True)
    mu = _mu(state.branch, Fn)
    mus = state.mus + (mu,)
    zeta = _zeta(mus)
    zeta1 = float(zeta[0])
    seq, _ = majorant_radius(zeta1, n)
    stopped = ""
    if zeta[-1] > BREAKDOWN_FACTOR * seq[-1]:
        stopped = (f"mu_{n} / mu_0 = {zeta[-1]:.3e} exceeds {BREAKDOWN_FACTOR:g} x majorant "
                   f"{seq[-1]:.3e}")
    return replace(state, F=state.F + (Fn,), HF=state.HF + (HFn,), lambdas=state.lambdas + (lam,),
                   mus=mus, majorant=tuple(seq), radius_estimate=_radius(mus, zeta1),
                   stopped=stopped, _K=state._K + (weighted_average_lambda(state.branch.n, Fn, strict=False),),
                   _dF=state._dF + (Fn.derivative(),))


def build_series(branch="smooth", terms: int = 8, N: int = 256, map_scale: float = 1.0,
                 n_max: int = N_MAX) -> SeriesState:
    s = new_state(branch, N, map_scale)
    while s.order < terms and not s.stopped:
        s = extend(s, n_max)
    return s


# ---------------------------------------------------------------------------
# evaluation


def _guard(state, a):
    if state.order < 1:
        return
    lim = RADIUS_SAFETY * state.radius_estimate
    if abs(a) > lim:
        raise ValueError(f"|a| = {abs(a):g} exceeds {RADIUS_SAFETY:g} x radius estimate "
                         f"{state.radius_estimate:.4g}")


def lambda_of(state: SeriesState, a: float) -> float:
    _guard(state, a)
    lam = float(sum(l * a ** k for k, l in enumerate(state.lambdas)))
    if not lam > -1:
        raise ValueError(f"lambda(a) = {lam:.4g} <= -1 is outside the construction's range")
    return lam


def holder_exponent(state: SeriesState, a: float) -> float:
    """alpha(a) = 1 - 1 / (1 + lambda(a)) on the smooth branch."""
    return 1.0 - 1.0 / (1.0 + lambda_of(state, a))


def evaluate_profile(state: SeriesState, a: float, terms: int | None = None) -> ProfilePair:
    """Partial sums of F and HF in w, with the last included term as truncation estimate."""
    lam = lambda_of(state, a)
    m = state.order if terms is None else min(terms, state.order)
    f = sum(a ** k * state.F[k].values for k in range(m + 1))
    h = sum(a ** k * state.HF[k].values for k in range(m + 1))
    like = state.F[0]
    trunc = abs(a) ** m * float(np.max(np.abs(state.F[m].values))) if m else 0.0
    br = state.branch
    return ProfilePair(HalfLineFunction.like(like, f), HalfLineFunction.like(like, h),
                       float(lam), state.alpha, float(a), complex(br.sin, br.cos), trunc)


def to_line(f: HalfLineFunction, modes: int = 1024, map_scale: float = 1.0) -> LineFunction:
    """Odd extension sgn(z) f~(|z|^alpha) sampled on the rational-Fourier grid."""
    ref = LineFunction.zeros(modes, map_scale)
    x = ref.x
    v = np.zeros(modes)
    v[1:] = f.to_line(x[1:])
    return LineFunction.from_values(v, map_scale, "odd")


def decay_exponent(p: ProfilePair, window=FIT_WINDOW) -> float:
    """Log-log slope of |F| in z from a fit over w in `window`.

    In the tilde variable the slope in z is alpha times the slope in w; fitting
    in w keeps the window in the asymptotic regime for every alpha.
    """
    F = p.F
    lo, hi = window
    if isinstance(F, LineFunction):
        nodes = F.x[np.isfinite(F.x)]
        alpha = 1.0
    else:
        nodes = F.w
        alpha = 1.0 / F.n
    inside = np.count_nonzero((nodes >= lo) & (nodes <= hi))
    if inside < 4:
        raise ValueError(f"only {inside} grid nodes in [{lo}, {hi}]: profile underresolved at large z")
    s = np.geomspace(lo, hi, 64)
    v = np.abs(F(s))
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise ValueError("profile vanishes or is not finite in the fit window")
    slope = np.polyfit(np.log(s), np.log(v), 1)[0]
    return float(alpha * slope)


# ---------------------------------------------------------------------------
# archive


def save_archive(state: SeriesState, directory, points=None) -> dict:
    """JSON manifest plus one CSV (w, F_n, HF_n) per term."""
    os.makedirs(directory, exist_ok=True)
    w = np.geomspace(1e-3, 1e3, 241) if points is None else np.asarray(points, float)
    files = []
    for k, (f, h) in enumerate(zip(state.F, state.HF)):
        name = f"F_{k}.csv"
        with open(os.path.join(directory, name), "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["w", "F", "HF"])
            for row in zip(w, f(w), h(w)):
                wr.writerow([f"{v:.15e}" for v in row])
        files.append(name)
    N, L = state.grid
    manifest = {
        "branch": state.branch.name,
        "alpha": str(state.alpha),
        "n_max": state.order,
        "lambda": [float(x) for x in state.lambdas[1:]],
        "mu": [float(x) for x in state.mus],
        "majorant": [float(x) for x in state.majorant],
        "radius": float(state.radius_estimate),
        "stopped": state.stopped,
        "grid": {"points": N, "map_scale": L},
        "files": files,
    }
    with open(os.path.join(directory, "lambda_series.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return manifest
