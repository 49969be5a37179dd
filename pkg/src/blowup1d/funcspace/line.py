"""Real functions on the line in a mapped Fourier (rational) basis.

The map x = -L cot(theta/2) sends the circle onto the real line, with theta = pi
at the origin and theta = 0 at the point at infinity.  Since

    exp(i theta) = (x - iL) / (x + iL),

trigonometric polynomials in theta are rational functions of x, and a function
holomorphic in the upper half-plane has only nonnegative Fourier modes.  The
Hilbert transform is therefore the multiplier -i sgn(k), up to a constant fixed
by decay at infinity.

Samples live on theta_j = 2 pi j / N (N even), so x = 0 is always a node.
Functions that tend to different constants at +-infinity (antiderivatives such
as Lambda^{-1} f) carry an extra `ramp` term r * (2/pi) arctan(x/L), which is
linear in theta.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

PARITIES = ("odd", "even", "none")

# relative size of f(infinity) above which transforms refuse the input
DECAY_TOL = 1e-9


def theta_grid(n: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n) / n


def x_of_theta(theta, L: float = 1.0):
    theta = np.asarray(theta, dtype=float)
    with np.errstate(divide="ignore"):
        return -L / np.tan(theta / 2.0)


def theta_of_x(x, L: float = 1.0):
    """Inverse map; returns theta in [0, 2pi], both infinities go to 0 / 2pi."""
    return 2.0 * np.arctan2(L, -np.asarray(x, dtype=float))


def _weights(n: int) -> np.ndarray:
    # multiplicity of each rfft mode in the real trigonometric interpolant
    w = np.full(n // 2 + 1, 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    return w


@dataclass(frozen=True, eq=False)
class LineFunction:
    """f(x) = sum_k c_k exp(i k theta(x)) + ramp * (theta(x) - pi) / pi.

    `coefficients` are the rfft coefficients of the samples divided by N.
    """

    coefficients: np.ndarray
    map_scale: float = 1.0
    parity: str = "none"
    ramp: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.ndim != 1 or c.size < 3:
            raise ValueError("need at least 4 modes")
        if self.parity not in PARITIES:
            raise ValueError(f"parity must be one of {PARITIES}")
        if not self.map_scale > 0:
            raise ValueError("map_scale must be positive")
        object.__setattr__(self, "coefficients", c)

    # construction ---------------------------------------------------------

    @classmethod
    def from_values(cls, values, map_scale=1.0, parity="none", ramp=0.0):
        values = np.asarray(values, dtype=float)
        n = values.size
        if n % 2:
            raise ValueError("mode count must be even")
        if ramp:
            values = values - ramp * _ramp_values(n)
        c = np.fft.rfft(values) / n
        c = _impose_parity(c, parity)
        return cls(c, float(map_scale), parity, float(ramp))

    @classmethod
    def from_function(cls, func, n, map_scale=1.0, parity="none", at_infinity=0.0):
        """Sample func on the mapped grid; the theta = 0 node takes `at_infinity`."""
        theta = theta_grid(n)
        x = x_of_theta(theta[1:], map_scale)
        vals = np.empty(n)
        vals[0] = at_infinity
        vals[1:] = func(x)
        return cls.from_values(vals, map_scale, parity)

    @classmethod
    def zeros(cls, n, map_scale=1.0, parity="odd"):
        return cls(np.zeros(n // 2 + 1, complex), map_scale, parity)

    # basic data -----------------------------------------------------------

    @property
    def mode_count(self) -> int:
        return 2 * (self.coefficients.size - 1)

    @property
    def theta(self) -> np.ndarray:
        return theta_grid(self.mode_count)

    @property
    def x(self) -> np.ndarray:
        return x_of_theta(self.theta, self.map_scale)

    @property
    def values(self) -> np.ndarray:
        n = self.mode_count
        v = np.fft.irfft(self.coefficients * n, n)
        if self.ramp:
            v = v + self.ramp * _ramp_values(n)
        return v

    def is_decaying(self, tol=DECAY_TOL) -> bool:
        if self.ramp:
            return False
        at_inf = abs(float(np.sum(_weights(self.mode_count) * self.coefficients.real)))
        scale = max(float(np.max(np.abs(self.values))), 1e-300)
        return at_inf <= tol * scale or at_inf < 1e-14

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        theta = theta_of_x(x, self.map_scale).ravel()
        out = self._eval_theta(theta, 0)
        if self.ramp:
            out = out + self.ramp * (theta - np.pi) / np.pi
        return out.reshape(x.shape)

    def _eval_theta(self, theta, order=0):
        n = self.mode_count
        k = np.arange(n // 2 + 1)
        c = self.coefficients * _weights(n) * (1j * k) ** order
        if order % 2:
            c[-1] = 0.0
        out = np.empty(theta.size)
        for s in range(0, theta.size, 2048):
            t = theta[s:s + 2048]
            out[s:s + 2048] = np.real(np.exp(1j * np.outer(t, k)) @ c)
        return out

    def theta_derivative_at(self, theta, order):
        """order-th theta derivative of the periodic part (ramp excluded)."""
        return self._eval_theta(np.atleast_1d(np.asarray(theta, float)), order)

    def shifted_values(self, delta: float) -> np.ndarray:
        """Values at theta_j + delta for all nodes j (one inverse FFT)."""
        n = self.mode_count
        k = np.arange(n // 2 + 1)
        c = self.coefficients * np.exp(1j * k * delta)
        c[-1] = self.coefficients[-1].real * np.cos(n * delta / 2)
        v = np.fft.irfft(c * n, n)
        if self.ramp:
            th = (self.theta + delta) % (2 * np.pi)
            v = v + self.ramp * (th - np.pi) / np.pi
        return v

    # calculus -------------------------------------------------------------

    def derivative(self, order: int = 1) -> "LineFunction":
        f = self
        for _ in range(order):
            f = f._derivative1()
        return f

    def _derivative1(self):
        n = self.mode_count
        k = np.arange(n // 2 + 1)
        d = 1j * k * self.coefficients
        d[-1] = 0.0
        g_theta = np.fft.irfft(d * n, n) + self.ramp / np.pi
        vals = (1.0 - np.cos(self.theta)) / self.map_scale * g_theta
        return LineFunction.from_values(vals, self.map_scale, _flip(self.parity))

    def hilbert(self) -> "LineFunction":
        """Hf(x) = (1/pi) p.v. int f(t) / (x - t) dt."""
        if not self.is_decaying():
            raise ValueError("Hilbert transform of a non-decaying function")
        n = self.mode_count
        h = -1j * self.coefficients
        h[0] = 0.0
        h[-1] = 0.0
        # remove the constant so that Hf vanishes at infinity
        h[0] = -np.sum(_weights(n)[1:] * h[1:].real)
        return LineFunction(h, self.map_scale, _flip(self.parity))

    def lambda_inv(self) -> "LineFunction":
        """z -> int_0^z Hf(s) ds for odd f; the result is odd with a ramp."""
        if self.parity != "odd":
            raise ValueError("lambda_inv requires an odd function")
        h = self.hilbert()
        n, L = self.mode_count, self.map_scale
        theta = self.theta
        hv = h.values
        psi = np.empty(n)
        psi[1:] = hv[1:] * (L / 2.0) / np.sin(theta[1:] / 2.0) ** 2
        # h ~ h''(0) theta^2 / 2 near the point at infinity
        psi[0] = L * h.theta_derivative_at(0.0, 2)[0]
        p = np.fft.rfft(psi) / n
        ramp = np.pi * p[0].real
        k = np.arange(n // 2 + 1)
        q = np.zeros_like(p)
        q[1:-1] = p[1:-1] / (1j * k[1:-1])
        q[0] = -np.sum(_weights(n)[1:] * np.real(q[1:] * np.exp(1j * k[1:] * np.pi)))
        return LineFunction(q, L, "odd", float(ramp))

    def boundary_data(self) -> dict:
        """f(0), f'(0), f''(0) and Hf(0) from the spectral coefficients."""
        L = self.map_scale
        d0, d1, d2 = (self.theta_derivative_at(np.pi, k)[0] for k in range(3))
        out = {
            "f0": d0,
            "f1": 2.0 / L * (d1 + self.ramp / np.pi),
            "f2": 4.0 / L ** 2 * d2,
        }
        out["Hf0"] = self.hilbert().theta_derivative_at(np.pi, 0)[0] if self.is_decaying() else np.nan
        return out

    def integral(self) -> float:
        """int_R f dx by trapezoid in theta (spectrally accurate for decaying f)."""
        if not self.is_decaying():
            raise ValueError("integral of a non-decaying function")
        g = self.values
        th = self.theta
        w = np.empty_like(g)
        w[1:] = g[1:] * (self.map_scale / 2.0) / np.sin(th[1:] / 2.0) ** 2
        w[0] = self.map_scale * self.theta_derivative_at(0.0, 2)[0]
        return float(np.sum(w) * 2 * np.pi / self.mode_count)

    def l2_norm(self) -> float:
        g = self.values
        th = self.theta
        integrand = np.empty_like(g)
        integrand[1:] = g[1:] ** 2 / np.sin(th[1:] / 2.0) ** 2
        integrand[0] = 4.0 * self.theta_derivative_at(0.0, 1)[0] ** 2
        return float(np.sqrt(self.map_scale / 2.0 * np.sum(integrand) * 2 * np.pi / self.mode_count))

    # algebra --------------------------------------------------------------

    def _check(self, other):
        if other.mode_count != self.mode_count or other.map_scale != self.map_scale:
            raise ValueError("incompatible grids")

    def __add__(self, other):
        if isinstance(other, LineFunction):
            self._check(other)
            par = self.parity if self.parity == other.parity else "none"
            return LineFunction(self.coefficients + other.coefficients, self.map_scale, par,
                                self.ramp + other.ramp)
        return NotImplemented

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        if isinstance(other, LineFunction):
            self._check(other)
            return LineFunction.from_values(self.values * other.values, self.map_scale,
                                            _prod_parity(self.parity, other.parity))
        if np.isscalar(other):
            return LineFunction(self.coefficients * other, self.map_scale, self.parity,
                                self.ramp * float(other))
        return NotImplemented

    __rmul__ = __mul__

    def times(self, func, parity=None, at_infinity=0.0) -> "LineFunction":
        """Pointwise product with an elementary function of x.

        The product's value at infinity is supplied by the caller.
        """
        x = self.x
        vals = self.values.copy()
        vals[1:] *= func(x[1:])
        vals[0] = at_infinity
        par = self.parity if parity is None else parity
        return LineFunction.from_values(vals, self.map_scale, par)

    def resample(self, n: int) -> "LineFunction":
        """Zero-pad or truncate the coefficient sequence to n modes."""
        m = n // 2 + 1
        c = np.zeros(m, complex)
        k = min(m, self.coefficients.size)
        c[:k] = self.coefficients[:k]
        if k == m:
            c[-1] = c[-1].real
        return LineFunction(c, self.map_scale, self.parity, self.ramp)

    def remap(self, map_scale: float, n: int | None = None) -> "LineFunction":
        """Re-expand on a grid with a different map scale (exact evaluation)."""
        n = self.mode_count if n is None else n
        x = x_of_theta(theta_grid(n)[1:], map_scale)
        vals = np.empty(n)
        vals[1:] = self(x)
        vals[0] = 0.0
        return LineFunction.from_values(vals, map_scale, self.parity, self.ramp)

    # i/o ------------------------------------------------------------------

    def to_csv(self, path, x=None):
        """Write (x, f, Hf) columns plus a JSON sidecar with the grid metadata."""
        x = np.linspace(-20, 20, 801) if x is None else np.asarray(x, float)
        hf = self.hilbert()(x) if self.is_decaying() else np.full_like(x, np.nan)
        data = np.column_stack([x, self(x), hf])
        np.savetxt(path, data, delimiter=",", header="x,f,Hf", comments="", fmt="%.15e")
        meta = {"basis": "rational-mapped-fourier", "mode_count": self.mode_count,
                "map_scale": self.map_scale, "parity": self.parity}
        with open(str(path) + ".json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)


def _ramp_values(n):
    return (theta_grid(n) - np.pi) / np.pi


def _flip(parity):
    return {"odd": "even", "even": "odd"}.get(parity, "none")


def _prod_parity(p, q):
    if "none" in (p, q):
        return "none"
    return "even" if p == q else "odd"


def _impose_parity(c, parity):
    # x -> -x is theta -> -theta, so odd f has a pure sine series
    if parity == "odd":
        return 1j * c.imag
    if parity == "even":
        return c.real + 0j
    return c


def sobolev_norm(f: LineFunction, s: int = 3) -> float:
    """sqrt(sum_{k <= s} ||f^(k)||_2^2) for a decaying line function."""
    if not 0 <= s <= 3:
        raise ValueError("s must be in 0..3")
    total = 0.0
    g = f
    for k in range(s + 1):
        if k:
            g = g.derivative()
        total += g.l2_norm() ** 2
    return float(np.sqrt(total))
