"""The linearized operator around the a = 0 profile, its consistency functional
and its explicit inverse.

Both branches are handled in the variable w (w = z on the smooth branch).
With c = cos(alpha pi / 2), s = sin(alpha pi / 2) and den(w) = 1 + 2cw + w^2,

    L f = f + w f' + 2 H F0 f + 2 F0 H f,    F0 = s w / den,  H F0 = -(1 + cw) / den.

L g = f is solvable with f'(0) = 0 iff ell(g) = g'(0) + 2 s Hg(0) vanishes, and
then, with h = Hg, h0 = h(0),

    Gq = (g - s g'(0) / den) / s^2,
    Hq = (h - (1 - s^2) h0 / den - eps s / (1 + s^2)) / s^2,   eps = h'(0) + 2 c h0,
    J1 = int_0^w  -c (1 + s^2) Gq - 2 s Gq + sin (1 - s^2) Hq,
    J2 = int_0^w   c (1 + s^2) Hq + 2 s Hq + sin (1 - s^2) Gq,

    f  = P J1 + Q J2,        Hf = -h0 - P J2 + Q J1,
    P  = w (-(1 + w^2) c - 2w) / den^2,   Q = s w (1 - w^2) / den^2.

eps vanishes exactly once ell(g) = 0; subtracting it keeps Hq bounded at round-off
level.  The quotients by s^2 are formed on Chebyshev coefficients, so no digits
are lost near w = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import chebyshev as C

from ..funcspace import HalfLineFunction, LineFunction, hilbert_alpha, hilbert_alpha_at_zero
from ..funcspace import halfline
from ..funcspace.halfline import _grid, _xi_of_w, cheb_coeffs, cumulative_integral

CONSISTENCY_TOL = 1e-7
ORIGIN_TOL = 1e-5


@dataclass(frozen=True)
class Branch:
    """n = 1/alpha; `tilde` selects HalfLineFunction data (always true for n > 1)."""

    n: int = 1
    tilde: bool = False

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("alpha must be 1/n with n a positive integer")
        if self.n > 1 and not self.tilde:
            raise ValueError("Hoelder branches live in the tilde variable")

    @classmethod
    def parse(cls, kind) -> "Branch":
        if isinstance(kind, Branch):
            return kind
        k = str(kind).strip().lower().replace(" ", "")
        if k == "smooth":
            return cls(1, False)
        if k.startswith("holder(1/") and k.endswith(")"):
            try:
                n = int(k[len("holder(1/"):-1])
            except ValueError:
                n = 0
            if n >= 1:
                return cls(n, True)
        raise ValueError(f"unknown branch {kind!r}; use 'smooth' or 'holder(1/n)'")

    @property
    def name(self) -> str:
        return f"holder(1/{self.n})" if self.n > 1 else "smooth"

    @property
    def angle(self) -> float:
        return np.pi / (2 * self.n)

    @property
    def sin(self) -> float:
        return 1.0 if self.n == 1 else float(np.sin(self.angle))

    @property
    def cos(self) -> float:
        return 0.0 if self.n == 1 else float(np.cos(self.angle))

    def f0(self, w):
        w = np.asarray(w, float)
        return self.sin * w / (1 + 2 * self.cos * w + w * w)

    def hf0(self, w):
        w = np.asarray(w, float)
        return -(1 + self.cos * np.abs(w)) / (1 + 2 * self.cos * np.abs(w) + w * w)

    def kernel_element(self, w):
        """w F0'(w), annihilated by L."""
        w = np.asarray(w, float)
        s, c = self.sin, self.cos
        return s * w * (1 - w * w) / (1 + 2 * c * w + w * w) ** 2

    def check(self, f):
        if self.tilde:
            if not isinstance(f, HalfLineFunction):
                raise TypeError(f"branch {self.name} acts on HalfLineFunction")
            if f.n != self.n:
                raise ValueError(f"function has alpha=1/{f.n}, branch is {self.name}")
        else:
            if not isinstance(f, LineFunction):
                raise TypeError("smooth branch acts on LineFunction")
            if f.parity != "odd":
                raise ValueError("smooth branch acts on odd functions")


SMOOTH = Branch()


def transform(branch: Branch, f):
    branch.check(f)
    return hilbert_alpha(branch.n, f) if branch.tilde else f.hilbert()


def _odd_line(values_pos, like: LineFunction):
    """Odd LineFunction from values at the positive nodes of `like`."""
    x = like.x
    vals = np.zeros(like.mode_count)
    pos = np.flatnonzero(x > 0)
    vals[pos] = values_pos
    # the node at -x_j mirrors the node at x_j
    neg = like.mode_count - pos
    vals[neg] = -values_pos
    return LineFunction.from_values(vals, like.map_scale, "odd")


def _positive_nodes(f: LineFunction):
    x = f.x
    pos = np.flatnonzero(x > 0)
    order = np.argsort(x[pos])
    return pos[order], x[pos][order]


# ---------------------------------------------------------------------------
# L and ell


def apply_L(branch, f, Hf=None):
    """L f with the branch's a = 0 profile; Hf may be supplied to skip the transform."""
    branch = Branch.parse(branch)
    branch.check(f)
    hf = transform(branch, f) if Hf is None else Hf
    if branch.tilde:
        w = f.w
        v = f.values + w * f.derivative().values + 2 * branch.hf0(w) * f.values \
            + 2 * branch.f0(w) * hf.values
        return HalfLineFunction.like(f, v)
    x = f.x
    df = f.derivative()
    v = np.zeros(f.mode_count)
    k = np.isfinite(x)
    xs = x[k]
    v[k] = (f.values[k] + xs * df.values[k] - 2 * f.values[k] / (1 + xs * xs)
            + 2 * xs * hf.values[k] / (1 + xs * xs))
    return LineFunction.from_values(v, f.map_scale, "odd")


def boundary(branch, g, Hg=None):
    """(g'(0), Hg(0)) from spectral data."""
    branch = Branch.parse(branch)
    branch.check(g)
    if branch.tilde:
        h0 = hilbert_alpha_at_zero(branch.n, g) if Hg is None else Hg.origin_value
        return g.origin_slope, float(h0)
    bd = g.boundary_data()
    h0 = bd["Hf0"] if Hg is None else Hg(np.array([0.0]))[0]
    return float(bd["f1"]), float(h0)


def consistency_value(branch, g, Hg=None) -> float:
    """ell(g) = g'(0) + 2 sin(alpha pi/2) Hg(0); zero exactly on the range of L."""
    branch = Branch.parse(branch)
    g1, h0 = boundary(branch, g, Hg)
    return float(g1 + 2 * branch.sin * h0)


# ---------------------------------------------------------------------------
# inverse


def _over_w(a, L):
    """Chebyshev coefficients of (f(w) - f(0)) / w, and f(0)."""
    f0 = C.chebval(-1.0, a)
    b = np.array(a, dtype=float if not np.iscomplexobj(a) else complex)
    b[0] -= f0
    q, _ = C.chebdiv(b, [1.0, 1.0])
    # 1 / w = (1 - xi)^p / (L (1 + xi))
    return C.chebmul(q, C.chebpow([1.0, -1.0], halfline.MAP_POWER)) / L, float(f0)


@dataclass(frozen=True, eq=False)
class InverseKernel:
    """The regularized integrands Gq, Hq of the inverse for data (g, Hg) on a Chebyshev grid."""

    branch: Branch
    g_values: np.ndarray
    h_values: np.ndarray
    map_scale: float = 1.0

    @cached_property
    def _data(self):
        L = self.map_scale
        d1g, g0 = _over_w(cheb_coeffs(self.g_values), L)
        d2g, g1 = _over_w(d1g, L)
        d1h, h0 = _over_w(cheb_coeffs(self.h_values), L)
        d2h, h1 = _over_w(d1h, L)
        return dict(g0=g0, g1=g1, h0=h0, h1=h1, d2g=d2g, d2h=d2h)

    @property
    def g0(self):
        return self._data["g0"]

    @property
    def g1(self):
        return self._data["g1"]

    @property
    def h0(self):
        return self._data["h0"]

    @property
    def h1(self):
        return self._data["h1"]

    @property
    def epsilon(self) -> float:
        return self.h1 + 2 * self.branch.cos * self.h0

    @property
    def ell(self) -> float:
        return self.g1 + 2 * self.branch.sin * self.h0

    # below SPLIT the quotients come from the divided Chebyshev series; above it
    # the subtraction is harmless and direct evaluation avoids amplifying the
    # series' absolute error by s^2
    SPLIT = 1.0

    @cached_property
    def _series(self):
        return cheb_coeffs(self.g_values), cheb_coeffs(self.h_values)

    def gq(self, s):
        d = self._data
        c = self.branch.cos
        s = np.asarray(s, float)
        den = 1 + 2 * c * s + s * s
        xi = _xi_of_w(s, self.map_scale)
        small = s < self.SPLIT
        out = np.empty_like(s)
        out[small] = C.chebval(xi[small], d["d2g"]) + d["g1"] * (2 * c + s[small]) / den[small]
        b = ~small
        g = C.chebval(xi[b], self._series[0])
        out[b] = (g - s[b] * d["g1"] / den[b]) / s[b] ** 2
        return out

    def hq(self, s):
        d = self._data
        c = self.branch.cos
        s = np.asarray(s, float)
        den = 1 + 2 * c * s + s * s
        xi = _xi_of_w(s, self.map_scale)
        small = s < self.SPLIT
        out = np.empty_like(s)
        ss = s[small]
        out[small] = (C.chebval(xi[small], d["d2h"])
                      + 2 * d["h0"] * (1 + ss * ss - 2 * c * c) / (den[small] * (1 + ss * ss))
                      + d["h1"] * ss / (1 + ss * ss))
        b = ~small
        sb = s[b]
        h = C.chebval(xi[b], self._series[1])
        out[b] = (h - (1 - sb * sb) * d["h0"] / den[b] - self.epsilon * sb / (1 + sb * sb)) / sb ** 2
        return out

    def prefactors(self, w):
        c, sn = self.branch.cos, self.branch.sin
        w = np.asarray(w, float)
        den = 1 + 2 * c * w + w * w
        P = w * (-(1 + w * w) * c - 2 * w) / den ** 2
        Q = sn * w * (1 - w * w) / den ** 2
        return P, Q

    def integrals(self, w, weight=None):
        """(J1, J2) at increasing nodes w > 0; `weight` overrides the integrand pair."""
        c, sn = self.branch.cos, self.branch.sin

        def pair(s):
            G, H = self.gq(s), self.hq(s)
            j1 = -c * (1 + s * s) * G - 2 * s * G + sn * (1 - s * s) * H
            j2 = c * (1 + s * s) * H + 2 * s * H + sn * (1 - s * s) * G
            return j1 + 1j * j2

        J = cumulative_integral(pair if weight is None else weight, w, self.map_scale)
        return J.real, J.imag

    def solve(self, w):
        """(f, Hf) at increasing nodes w > 0."""
        w = np.asarray(w, float)
        P, Q = self.prefactors(w)
        J1, J2 = self.integrals(w)
        return P * J1 + Q * J2, -self.h0 - P * J2 + Q * J1


def _kernel_for(branch, g, Hg, cheb_size=None):
    if branch.tilde:
        hg = hilbert_alpha(branch.n, g) if Hg is None else Hg
        return InverseKernel(branch, g.values, hg.values, g.map_scale)
    hg = g.hilbert() if Hg is None else Hg
    N = cheb_size or g.mode_count
    _, w, _ = _grid(N, g.map_scale)
    return InverseKernel(branch, g(w), hg(w), g.map_scale)


class ConsistencyError(ValueError):
    def __init__(self, ell, tol):
        super().__init__(f"right side violates the consistency condition: ell = {ell:.3e} (tol {tol:.1e})")
        self.ell = ell


def invert_L(branch, g, Hg=None, tol=CONSISTENCY_TOL, return_transform=False):
    """Unique f with L f = g and f'(0) = 0 (and f~(0) = 0 on Hoelder branches)."""
    branch = Branch.parse(branch)
    branch.check(g)
    scale = 1.0 + float(np.max(np.abs(g.values)))
    ell = consistency_value(branch, g, Hg)
    if abs(ell) > tol * scale:
        raise ConsistencyError(ell, tol * scale)
    # g(0) enters only through round-off (the inverse uses (g - g(0)) / w)
    if branch.tilde and abs(g.origin_value) > ORIGIN_TOL * scale:
        raise ValueError("Hoelder right sides must vanish at w = 0")
    K = _kernel_for(branch, g, Hg)
    if branch.tilde:
        f, hf = K.solve(g.w)
        F = HalfLineFunction.like(g, f)
        HF = HalfLineFunction.like(g, hf)
    else:
        idx, x = _positive_nodes(g)
        f, hf = K.solve(x)
        F = _odd_line(f, g)
        HF = F.hilbert()
    return (F, HF) if return_transform else F


# ---------------------------------------------------------------------------
# the T / S decomposition (diagnostic)


def ts_operator(branch, kind: str, sigma: int, g, Hg=None, prefactor="P"):
    """Prefactor(w) int_0^w s^sigma (ghat or hhat)(s) / s ds at the natural nodes.

    kind 'T' integrates ghat / s = s Gq, kind 'S' integrates hhat / s = s Hq.
    On the smooth branch prefactor 'Q' is z (1 - z^2)/(1 + z^2)^2 (the l = 1
    family) and 'P' is -2 z^2/(1 + z^2)^2; the l = 2 family is -P.
    """
    branch = Branch.parse(branch)
    if kind not in ("T", "S") or sigma not in (-1, 0, 1) or prefactor not in ("P", "Q"):
        raise ValueError("kind in {T, S}, sigma in {-1, 0, 1}, prefactor in {P, Q}")
    K = _kernel_for(branch, g, Hg)
    w = g.w if branch.tilde else _positive_nodes(g)[1]
    q = K.gq if kind == "T" else K.hq
    J = cumulative_integral(lambda s: s ** (sigma + 1) * q(s), w, K.map_scale)
    P, Q = K.prefactors(w)
    return (P if prefactor == "P" else Q) * J


def split_inverse(branch, g, Hg=None) -> dict:
    """Inverse rebuilt from the T / S pieces.

    Smooth: T^{1,-1} - T^{1,1} + 2 S^{1,0} + 2 T^{2,0} - S^{2,-1} + S^{2,1}, with
    T^{1,.} = Q int, T^{2,.} = 2 z^2/(1+z^2)^2 int = -P int.
    Hoelder: part I = P (-c T^-1 - c T^1 - 2 T^0 + s S^-1 - s S^1),
             part II = Q (c S^-1 + c S^1 + 2 S^0 + s T^-1 - s T^1).
    """
    branch = Branch.parse(branch)
    c, sn = branch.cos, branch.sin

    def op(kind, sigma, pre):
        return ts_operator(branch, kind, sigma, g, Hg, pre)

    part1 = (-c * (op("T", -1, "P") + op("T", 1, "P")) - 2 * op("T", 0, "P")
             + sn * (op("S", -1, "P") - op("S", 1, "P")))
    part2 = (c * (op("S", -1, "Q") + op("S", 1, "Q")) + 2 * op("S", 0, "Q")
             + sn * (op("T", -1, "Q") - op("T", 1, "Q")))
    out = {"I": part1, "II": part2, "total": part1 + part2}
    if not branch.tilde:
        twelve = (op("T", -1, "Q") - op("T", 1, "Q") + 2 * op("S", 0, "Q")
                  - 2 * op("T", 0, "P") + op("S", -1, "P") - op("S", 1, "P"))
        out["twelve"] = twelve
    return out
