"""Closed-form evolutions and self-similar profiles for a = 0.

The CLM equation w_t = -2 w Hw is solved by Phi = Hw + i w, which obeys
Phi_t = -Phi^2, so Phi(t) = Phi0 / (1 + t Phi0), i.e.

    w(t) = w0 / ((1 + t Hw0)^2 + t^2 w0^2),
    Hw(t) = (Hw0 (1 + t Hw0) + t w0^2) / ((1 + t Hw0)^2 + t^2 w0^2).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .funcspace import (HalfLineFunction, LineFunction, hilbert_alpha, hilbert_alpha_at,
                        hilbert_alpha_at_zero, weighted_average_lambda)
from .funcspace.pv import pv_cot_constant

SCAN_POINTS = 10_000


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True, eq=False)
class ClmData:
    """Odd initial vorticity on the line with its cached Hilbert transform."""

    omega0: LineFunction
    h_omega0: LineFunction | None = None
    zero_set_scan: int = SCAN_POINTS
    window: float = 50.0

    def __post_init__(self):
        if self.omega0.parity != "odd":
            raise ValueError("CLM data must be odd")
        if self.h_omega0 is None:
            object.__setattr__(self, "h_omega0", self.omega0.hilbert())

    @classmethod
    def from_function(cls, func, n=512, map_scale=1.0, **kw):
        return cls(LineFunction.from_function(func, n, map_scale, parity="odd"), **kw)

    def values(self, t, x):
        """(w(t, x), Hw(t, x)) from the closed form."""
        x = np.asarray(x, float)
        return _clm_formula(self.omega0(x), self.h_omega0(x), t)

    @property
    def slope_at_origin(self) -> float:
        return float(self.omega0.boundary_data()["f1"])

    @property
    def h_at_origin(self) -> float:
        return float(self.omega0.boundary_data()["Hf0"])


@dataclass(frozen=True, eq=False)
class HolderSeedData:
    """w0(x) = sgn(x) |x|^alpha Omega1(x), alpha = 1/n, stored through w~0(w) = w Omega1~(w)."""

    alpha: Fraction
    modulation1: HalfLineFunction
    C: float = field(init=False)
    omega2_at_zero: float = field(init=False)

    def __post_init__(self):
        a = Fraction(self.alpha)
        if a.numerator != 1 or a.denominator < 2:
            raise ValueError("case 2 needs alpha = 1/n with n >= 2")
        object.__setattr__(self, "alpha", a)
        m = self.modulation1
        if m.n != a.denominator:
            raise ValueError("modulation1 has a different alpha")
        if abs(m.origin_value - 1.0) > 1e-8:
            raise ValueError("Omega1(0) must be 1")
        if np.min(m.values) <= 0:
            raise ValueError("Omega1 must be positive")
        w0 = self.omega_tilde
        C = hilbert_alpha_at_zero(self.n, w0)
        # Richardson on (H~w~0(w) - C) / w at small w
        h = 1e-4
        q1, q2 = (hilbert_alpha_at(self.n, w0, [h, 2 * h]) - C) / np.array([h, 2 * h])
        object.__setattr__(self, "C", float(C))
        object.__setattr__(self, "omega2_at_zero", float(2 * q1 - q2))

    @classmethod
    def from_function(cls, omega1, n, N=256, map_scale=1.0):
        """omega1 is the even modulation as a function of x >= 0."""
        mod = HalfLineFunction.from_function(lambda w: omega1(w ** n), n, N, map_scale)
        return cls(Fraction(1, n), mod)

    @property
    def n(self) -> int:
        return self.alpha.denominator

    @property
    def omega_tilde(self) -> HalfLineFunction:
        return self.modulation1.times(lambda w: w)

    @property
    def cot_constant(self) -> float:
        """Omega2(0) predicted by the p.v. constant: pv_cot_constant / pi."""
        return pv_cot_constant(float(self.alpha)) / np.pi

    def values(self, t, x):
        x = np.asarray(x, float)
        w = np.abs(x) ** float(self.alpha)
        om = np.sign(x) * self.omega_tilde(w)
        return _clm_formula(om, self.h_omega_tilde(w), t)

    @cached_property
    def h_omega_tilde(self) -> HalfLineFunction:
        return hilbert_alpha(self.n, self.omega_tilde)


@dataclass(frozen=True, eq=False)
class ProfilePair:
    F: LineFunction | HalfLineFunction
    HF: LineFunction | HalfLineFunction
    lam: float = 0.0
    alpha: Fraction = Fraction(1)
    a: float = 0.0
    C: complex | None = None
    truncation: float = 0.0


@dataclass(frozen=True)
class BlowupTime:
    time: float
    location: float | None
    message: str = ""

    @property
    def finite(self) -> bool:
        return np.isfinite(self.time)


# ---------------------------------------------------------------------------
# CLM


def _clm_formula(om0, hom0, t):
    den = (1 + t * hom0) ** 2 + (t * om0) ** 2
    return om0 / den, (hom0 * (1 + t * hom0) + t * om0 ** 2) / den


def clm_blowup_time(data: ClmData) -> BlowupTime:
    """t* = 1 / sup_{x in Z} (-Hw0(x)) over Z = {w0 = 0, Hw0 < 0}."""
    x = np.linspace(-data.window, data.window, data.zero_set_scan)
    v = data.omega0(x)
    cand = [0.0]  # odd data vanishes at the origin
    s = np.sign(v)
    idx = np.flatnonzero(s[:-1] * s[1:] < 0)
    for i in idx:
        x0, x1, v0, v1 = x[i], x[i + 1], v[i], v[i + 1]
        cand.append(x0 - v0 * (x1 - x0) / (v1 - v0))
    cand = np.array(sorted(set(np.round(cand, 14))))
    h = data.h_omega0(cand)
    neg = h < 0
    if not neg.any():
        return BlowupTime(np.inf, None, "no predicted blow-up (global by this criterion)")
    k = np.argmin(np.where(neg, h, np.inf))
    return BlowupTime(float(-1.0 / h[k]), float(cand[k]))


def clm_evolve(data: ClmData, t: float, map_scale: float | None = None):
    """(w(t), Hw(t)) as LineFunctions sampled from the closed form."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    tstar = clm_blowup_time(data).time
    if t >= tstar:
        raise ValueError(f"t = {t} is past the blow-up time t* = {tstar}")
    w0 = data.omega0
    if t == 0:
        return w0, data.h_omega0
    L = w0.map_scale if map_scale is None else map_scale
    n = w0.mode_count
    ref = LineFunction.zeros(n, L)
    x = ref.x[1:]
    om, hom = data.values(t, x)
    vo, vh = np.zeros(n), np.zeros(n)
    vo[1:], vh[1:] = om, hom
    return (LineFunction.from_values(vo, L, "odd"), LineFunction.from_values(vh, L, "even"))


# ---------------------------------------------------------------------------
# toy model  w_t = a Hw(0) x w_x - 2 Hw(0) w


def toy_constants(omega0: LineFunction):
    """(c0, t*) with c0 = -Hw0(0) and t* = 1 / (2 c0)."""
    c0 = -float(omega0.boundary_data()["Hf0"])
    return c0, (np.inf if c0 <= 0 else 1.0 / (2 * c0))


def toy_evolve(omega0: LineFunction, a: float, t: float) -> LineFunction:
    """w(t, x) = (1 - 2 c0 t)^-1 w0(x (1 - 2 c0 t)^(a/2))."""
    if omega0.parity != "odd":
        raise ValueError("toy model data must be odd")
    xs = omega0.x[1:]
    if np.min(omega0.values[1:][xs > 0]) < -1e-12 * np.max(np.abs(omega0.values)):
        raise ValueError("toy model data must be nonnegative on x > 0")
    c0, tstar = toy_constants(omega0)
    if t >= tstar:
        raise ValueError(f"t = {t} is past the blow-up time t* = {tstar}")
    if t == 0:
        return omega0
    s = 1 - 2 * c0 * t
    vals = np.zeros(omega0.mode_count)
    vals[1:] = omega0(xs * s ** (a / 2)) / s
    return LineFunction.from_values(vals, omega0.map_scale, "odd")


# ---------------------------------------------------------------------------
# profiles


def _parse_kind(kind):
    if isinstance(kind, str):
        k = kind.strip().lower()
        if k == "smooth":
            return None
        m = re.fullmatch(r"holder\(\s*1\s*/\s*(\d+)\s*\)", k)
        if m:
            return int(m.group(1))
        raise ValueError(f"unknown profile kind {kind!r}; use 'smooth' or 'holder(1/n)'")
    return int(kind) if kind else None


def profile_clm(kind="smooth", N=256, map_scale=1.0) -> ProfilePair:
    """Exact a = 0 profile: z/(1+z^2) or the Hoelder pair in w = |z|^alpha."""
    n = _parse_kind(kind)
    if n is None or n == 1:
        F = LineFunction.from_function(lambda x: x / (1 + x * x), max(N, 64), map_scale, "odd")
        HF = LineFunction.from_function(lambda x: -1 / (1 + x * x), max(N, 64), map_scale, "even")
        return ProfilePair(F, HF, 0.0, Fraction(1), 0.0, complex(1, 0))
    a = np.pi / (2 * n)
    s, c = np.sin(a), np.cos(a)
    F = HalfLineFunction.from_function(lambda w: s * w / (1 + 2 * c * w + w * w), n, N, map_scale)
    HF = HalfLineFunction.from_function(lambda w: -(1 + c * w) / (1 + 2 * c * w + w * w), n, N, map_scale)
    return ProfilePair(F, HF, 0.0, Fraction(1, n), 0.0, complex(s, c))


LINE_RESIDUAL_GRID = np.linspace(-20.0, 20.0, 801)
TILDE_RESIDUAL_WINDOW = 1e3


def profile_residual(p: ProfilePair, grid=None) -> float:
    """sup |F + ((1+lam) z - a Lambda^-1 F) F' + 2 F HF| (HF recomputed by the transform)."""
    F = p.F
    if isinstance(F, LineFunction):
        x = LINE_RESIDUAL_GRID if grid is None else np.asarray(grid, float)
        HF = F.hilbert()
        dF = F.derivative()
        r = F(x) + (1 + p.lam) * x * dF(x) + 2 * F(x) * HF(x)
        if p.a:
            r = r - p.a * F.lambda_inv()(x) * dF(x)
        return float(np.max(np.abs(r)))
    n = F.n
    HF = hilbert_alpha(n, F, strict=False)
    dF = F.derivative()
    r = F.values + (1 + p.lam) * F.w * dF.values + 2 * F.values * HF.values
    if p.a:
        r = r - p.a * weighted_average_lambda(n, F, strict=False).values * dF.values
    keep = F.w <= (TILDE_RESIDUAL_WINDOW if grid is None else grid)
    return float(np.max(np.abs(r[keep])))


# ---------------------------------------------------------------------------
# collapse onto the profiles


@dataclass(frozen=True)
class Collapse:
    rescaled: object
    distance: float
    t_star: float
    scalings: dict


def collapse_extract(data, t: float, points: int = 401):
    """Self-similar rescaling of the exact solution near t*, compared with the profile."""
    if isinstance(data, ClmData):
        return _collapse_case1(data, t, points)
    if isinstance(data, HolderSeedData):
        return _collapse_case2(data, t, points)
    raise TypeError("expected ClmData or HolderSeedData")


def _collapse_case1(data, t, points):
    d, h = data.slope_at_origin, data.h_at_origin
    if not (d > 0 and h < 0):
        raise ValueError("case 1 needs w0'(0) > 0 and Hw0(0) < 0")
    tstar = -1.0 / h
    if not 0.9 * tstar <= t < tstar:
        raise ValueError(f"t must lie in [0.9 t*, t*) with t* = {tstar}")
    kappa, ell = 1.0 / abs(h), d / abs(h)  # normalized data kappa w0(x / ell)
    tau = t / tstar

    def rescaled(z):
        z = np.asarray(z, float)
        om, _ = data.values(t, (1 - tau) * z / ell)
        return (1 - tau) * kappa * om

    z = np.linspace(-10, 10, points)
    dist = float(np.max(np.abs(rescaled(z) - z / (1 + z * z))))
    return Collapse(rescaled, dist, tstar, {"amplitude": kappa, "length": 1 / ell, "time": tstar})


def _collapse_case2(data, t, points):
    C = data.C
    if not C < 0:
        raise ValueError("case 2 needs Hw0(0) < 0")
    tstar = -1.0 / C
    if not 0.9 * tstar <= t < tstar:
        raise ValueError(f"t must lie in [0.9 t*, t*) with t* = {tstar}")
    a = float(data.alpha)
    kappa = 1.0 / abs(C)          # amplitude; normalized data kappa w0(x |C|^(1/alpha))
    stretch = abs(C) ** (1 / a)
    tau = t / tstar
    # the limit is F(z sin(alpha pi/2)^(-1/alpha)); undo that scale so the target is F_alpha itself
    scale = np.sin(a * np.pi / 2) ** (1 / a)
    s, c = np.sin(a * np.pi / 2), np.cos(a * np.pi / 2)

    def rescaled(z):
        z = np.asarray(z, float)
        x = (1 - tau) ** (1 / a) * z * scale * stretch
        om, _ = data.values(t, x)
        return (1 - tau) * kappa * om

    def target(z):
        w = np.abs(z) ** a
        return np.sign(z) * s * w / (1 + 2 * c * w + w * w)

    z = np.linspace(-1, 1, points)
    dist = float(np.max(np.abs(rescaled(z) - target(z))))
    return Collapse(rescaled, dist, tstar,
                    {"amplitude": kappa, "length": 1 / stretch, "time": tstar, "profile_scale": scale})
