"""Principal-value quadrature for integrals with one simple pole."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

SCHEMES = ("symmetric-cancellation", "subtraction")
ALPHA_RANGE = (0.05, 0.95)


@dataclass(frozen=True)
class PvQuadrature:
    """p.v. int_a^b phi(t) / (t - p) dt.

    A window [p - r, p + r] around the pole is treated by Gauss-Legendre
    with node_count nodes per side; the rest is regular and goes to quad.
    Infinite endpoints are truncated at distance cutoff from the pole.
    """

    node_count: int = 2048
    cutoff: float = np.inf
    singularity_scheme: str = "subtraction"
    window: float = 1.0

    def __post_init__(self):
        if self.node_count < 2:
            raise ValueError("node_count must be >= 2")
        if not self.cutoff > 0:
            raise ValueError("cutoff must be positive")
        if self.singularity_scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.singularity_scheme!r}")

    def __call__(self, phi, pole, a=-np.inf, b=np.inf, pole_value=None):
        a = max(a, pole - self.cutoff)
        b = min(b, pole + self.cutoff)
        if not a < pole < b:
            raise ValueError("pole must lie strictly inside (a, b)")
        r = min(pole - a, b - pole, self.window)
        x, wt = np.polynomial.legendre.leggauss(self.node_count)
        s = 0.5 * r * (x + 1)  # nodes in (0, r)
        ws = 0.5 * r * wt
        if self.singularity_scheme == "symmetric-cancellation":
            near = np.sum(ws * (phi(pole + s) - phi(pole - s)) / s)
        else:
            p0 = phi(pole) if pole_value is None else pole_value
            # the subtracted constant integrates to p0 ln(r / r) = 0 on the window
            near = np.sum(ws * (phi(pole + s) - p0) / s) - np.sum(ws * (phi(pole - s) - p0) / s)
        far = 0.0
        g = lambda t: phi(t) / (t - pole)
        if pole - r > a:
            far += quad(g, a, pole - r, limit=500, epsabs=1e-13, epsrel=1e-12)[0]
        if pole + r < b:
            far += quad(g, pole + r, b, limit=500, epsabs=1e-13, epsrel=1e-12)[0]
        return float(near + far)

    def hilbert_at(self, f, x):
        """Hf(x) = (1/pi) p.v. int f(t) / (x - t) dt for a callable f."""
        return -self(f, x) / np.pi


def pv_cot_constant(alpha: float, quadrature: PvQuadrature | None = None) -> float:
    """p.v. int_R dz / ((1 - z) |z|^(1 - alpha)), which equals pi cot(alpha pi / 2).

    With u = |z|^alpha and m = 1/alpha the integral becomes
    m [p.v. int_0^inf du / (1 - u^m) + int_0^inf du / (1 + u^m)],
    whose only singularity is a simple pole at u = 1.
    """
    lo, hi = ALPHA_RANGE
    if not lo <= alpha <= hi:
        raise ValueError(f"alpha must lie in [{lo}, {hi}]")
    m = 1.0 / alpha
    q = quadrature or PvQuadrature()

    def phi(u):
        u = np.asarray(u, float)
        d = u ** m - 1
        with np.errstate(invalid="ignore", divide="ignore"):
            out = -(u - 1) / d
        return np.where(np.abs(u - 1) < 1e-12, -1.0 / m, out)

    # 1/(1 - u^m) = phi(u) / (u - 1)
    pv = q(lambda u: phi(u), 1.0, 0.0, np.inf, pole_value=-1.0 / m)
    reg = quad(lambda u: 1.0 / (1 + u ** m), 0, np.inf, limit=500, epsabs=1e-13)[0]
    return float(m * (pv + reg))
