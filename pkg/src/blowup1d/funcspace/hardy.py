"""Hardy averages on the half-line and their L2 amplification ratios.

The average is A f(z) = z^-1 int_0^z f, or, with alpha = 1/n and the weight
(1/alpha) t^(1/alpha - 1),

    A f(w) = w^(-1/alpha) int_0^w f(t) (1/alpha) t^(1/alpha - 1) dt.

Differentiating under the integral gives d^s (A f) = A_s (f^(s)) with

    A_s g(w) = (1/alpha) w^(-s - 1/alpha) int_0^w t^(s + 1/alpha - 1) g(t) dt,

whose L2 norm is c_s = (1/alpha) / (s + 1/alpha - 1/2).  For alpha = 1 this is
the classical 2 / (2s + 1).
"""

from __future__ import annotations

import numpy as np

from .halfline import HalfLineFunction, cumulative_integral

# the log-variable route keeps at least this many samples per unit of ln z
_LOG_DENSITY = 64
_LOG_MAX_RANGE = 4000.0


def sharp_constant(sigma: int, alpha=None) -> float:
    a = 1.0 if alpha is None else float(alpha)
    return (1 / a) / (sigma + 1 / a - 0.5)


def hardy_average(f, sigma: int, alpha=None):
    """Return (A f, ||d^sigma A f||_2 / ||d^sigma f||_2).

    f is a HalfLineFunction (smooth data, Chebyshev route) or a callable on
    (0, inf).  A callable is read as z^(sigma - 1/2) chi(ln z) with chi
    decaying at both ends of the log axis; that covers power-law cutoffs,
    which are the near-extremal functions.
    """
    if int(sigma) != sigma or not 0 <= sigma <= 3:
        raise ValueError("sigma must be 0, 1, 2 or 3")
    sigma = int(sigma)
    if alpha is not None and not 0 < float(alpha) <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if isinstance(f, HalfLineFunction):
        return _hardy_chebyshev(f, sigma, alpha)
    return _hardy_log(f, sigma, alpha)


def _hardy_chebyshev(f, sigma, alpha):
    m = 1.0 if alpha is None else 1.0 / float(alpha)
    w, q, L = f.w, f.weights, f.map_scale
    # output values at the nodes
    avg = m * w ** -m * cumulative_integral(lambda t: f(t) * t ** (m - 1), w, L)
    out = HalfLineFunction.like(f, avg)
    g = f
    for _ in range(sigma):
        g = g.derivative()
    den = np.sqrt(np.sum(q * g.values ** 2))
    if den == 0:
        return out, 0.0
    dg = m * w ** (-sigma - m) * cumulative_integral(lambda t: g(t) * t ** (sigma + m - 1), w, L)
    return out, float(np.sqrt(np.sum(q * dg ** 2)) / den)


def _log_samples(f, beta):
    span = 40.0
    while True:
        n = int(2 ** np.ceil(np.log2(2 * span * _LOG_DENSITY)))
        s = -span + 2 * span * np.arange(n) / n
        if hasattr(f, "chi") and getattr(f, "sigma", None) == beta + 0.5:
            chi = f.chi(s)
        else:
            with np.errstate(over="ignore", under="ignore", invalid="ignore"):
                chi = np.exp(-beta * s) * f(np.exp(s))
            chi = np.nan_to_num(chi, nan=0.0, posinf=0.0, neginf=0.0)
        peak = np.max(np.abs(chi))
        if peak == 0 or max(abs(chi[0]), abs(chi[-1])) <= 1e-14 * peak:
            return s, chi
        if span >= _LOG_MAX_RANGE:
            raise ValueError("f z^(1/2 - sigma) does not decay along ln z")
        span *= 2


def _hardy_log(f, sigma, alpha):
    a = 1.0 if alpha is None else float(alpha)
    beta = sigma - 0.5
    s, chi = _log_samples(f, beta)
    n = s.size
    k = 2 * np.pi * np.fft.fftfreq(n, d=s[1] - s[0])
    c = np.fft.fft(chi)
    # z^(1/2) f^(sigma) = prod_{i < sigma} (d/ds + beta - i) chi, since beta - sigma + 1/2 = 0
    p = np.ones(n, complex)
    for i in range(sigma):
        p = p * (1j * k + beta - i)
    g = p * c
    den = np.sqrt(np.sum(np.abs(g) ** 2))
    # A f = z^beta psi with alpha psi' + (1 + alpha beta) psi = chi
    psi = np.real(np.fft.ifft(c / (1 + a * beta + 1j * a * k)))

    def out(z):
        z = np.asarray(z, float)
        return z ** beta * np.interp(np.log(z), s, psi)

    if den == 0:
        return out, 0.0
    mult = (1 / a) / (sigma + 1 / a - 0.5 + 1j * k)
    return out, float(np.sqrt(np.sum(np.abs(mult * g) ** 2)) / den)


class power_cutoff:
    """z^(sigma - 1/2) sech(delta ln z); the ratio tends to the sharp constant as delta -> 0.

    Also exposes chi(s) = sech(delta s) so that wide log ranges need no
    overflowing powers of z.
    """

    def __init__(self, sigma: int, delta: float):
        if not delta > 0:
            raise ValueError("delta must be positive")
        self.sigma, self.delta = sigma, float(delta)

    def chi(self, s):
        return 1.0 / np.cosh(self.delta * np.asarray(s, float))

    def __call__(self, z):
        z = np.asarray(z, float)
        return z ** (self.sigma - 0.5) * self.chi(np.log(z))
