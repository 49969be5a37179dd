"""Residuals of the transform identities, as sup-norms of (left - right).

Line identities act on LineFunction, with H the Hilbert transform:

    tricomi    H(f Hg + g Hf) = Hf Hg - f g
    multip_z   H(z f)(z) = z Hf(z) - (1/pi) int f
    divid_z    H(f / z)(z) = (Hf(z) - Hf(0)) / z            (f(0) = 0)

Identities for the tilde transform act on HalfLineFunction.  M_j is the piece
with kernel (1/pi) zeta^j / (w - zeta^j t), zeta = exp(i pi / n):

    mult_by_w  M_j(t f)(w) = zeta^-j w M_j f(w) - (1/pi) int f
    div_by_w   M_j(f / t)(w) = zeta^j (M_j f(w) - M_j f(0)) / w  (f(0) = 0)
    diff       M_j(f')(w) = zeta^j (M_j f)'(w) - zeta^j f(0) / (pi w)
    identity   H~(t f')(w) = w (H~ f)'(w)

The piece identities are checked for every j = 1..n-1 and the worst is returned.
"""

from __future__ import annotations

import numpy as np

from .halfline import (HalfLineFunction, KernelPiece, apply_piece, hilbert_alpha,
                       piece_difference_from_zero)
from .line import LineFunction

LINE_KINDS = ("tricomi", "multip_z", "divid_z")
ALPHA_KINDS = ("mult_by_w", "div_by_w", "diff", "identity")
KINDS = LINE_KINDS + ALPHA_KINDS

LINE_GRID = np.linspace(-10.0, 10.0, 401)
# evaluation window for half-line identities (derivatives lose accuracy far out)
ALPHA_WINDOW = (1e-3, 1e3)


def identity_residual(kind: str, f, g=None, grid=None) -> float:
    if kind not in KINDS:
        raise ValueError(f"unknown identity {kind!r}; expected one of {KINDS}")
    if kind in LINE_KINDS:
        if not isinstance(f, LineFunction):
            raise TypeError(f"{kind} acts on LineFunction")
        x = LINE_GRID if grid is None else np.asarray(grid, float)
        return float(np.max(np.abs(_LINE[kind](f, g, x))))
    if not isinstance(f, HalfLineFunction):
        raise TypeError(f"{kind} acts on HalfLineFunction")
    if g is not None and getattr(g, "n", f.n) != f.n:
        raise ValueError("mismatched alpha")
    diff = _ALPHA[kind](f)
    lo, hi = ALPHA_WINDOW if grid is None else grid
    keep = (f.w >= lo) & (f.w <= hi)
    return float(np.max(np.abs(diff[keep])))


def _tricomi(f, g, x):
    g = f if g is None else g
    hf, hg = f.hilbert(), g.hilbert()
    lhs = (f * hg + g * hf).hilbert()
    return lhs(x) - (hf(x) * hg(x) - f(x) * g(x))


def _limit_times_x(f):
    # x f(x) at infinity; x ~ -2L/theta near theta = 0
    return float(-2 * f.map_scale * f.theta_derivative_at(0.0, 1)[0])


def _multip_z(f, g, x):
    c = _limit_times_x(f)
    zf = f.times(lambda s: s, parity=_times_x_parity(f.parity), at_infinity=c)
    lhs = (zf - _constant(f, c)).hilbert()(x)
    return lhs - (x * f.hilbert()(x) - f.integral() / np.pi)


def _divid_z(f, g, x):
    bd = f.boundary_data()
    if abs(bd["f0"]) > 1e-9 * max(1.0, float(np.max(np.abs(f.values)))):
        raise ValueError("divid_z needs f(0) = 0")
    xs = f.x
    vals = np.empty_like(xs)
    zero = np.isclose(f.theta, np.pi)
    nz = ~zero
    nz[0] = False
    vals[nz] = f.values[nz] / xs[nz]
    vals[zero] = bd["f1"]
    vals[0] = 0.0
    q = LineFunction.from_values(vals, f.map_scale, _times_x_parity(f.parity))
    hf = f.hilbert()
    with np.errstate(divide="ignore", invalid="ignore"):
        rhs = (hf(x) - bd["Hf0"]) / x
    small = np.abs(x) < 1e-8
    if small.any():
        rhs[small] = hf.derivative()(x[small])
    return q.hilbert()(x) - rhs


def _times_x_parity(p):
    return {"odd": "even", "even": "odd"}.get(p, "none")


def _constant(f, c):
    n = f.mode_count
    return LineFunction.from_values(np.full(n, c), f.map_scale, "even" if c else f.parity)


_LINE = {"tricomi": _tricomi, "multip_z": _multip_z, "divid_z": _divid_z}


def _pieces(n):
    return [KernelPiece(n, j) for j in range(1, n)]


def _mult_by_w(f):
    total = float(np.sum(f.weights * f.values))
    tf = f.times(lambda t: t)
    worst = np.zeros(f.size)
    for p in _pieces(f.n):
        lhs = apply_piece(p, tf)
        rhs = f.w * apply_piece(p, f) / p.zeta - total / np.pi
        worst = np.maximum(worst, np.abs(lhs - rhs))
    return worst


def _div_by_w(f):
    q = f.times(lambda t: 1.0 / t)
    worst = np.zeros(f.size)
    for p in _pieces(f.n):
        lhs = apply_piece(p, q)
        rhs = p.zeta * piece_difference_from_zero(p, f) / f.w
        worst = np.maximum(worst, np.abs(lhs - rhs))
    return worst


def _diff(f):
    f0 = f.origin_value
    df = f.derivative()
    worst = np.zeros(f.size)
    for p in _pieces(f.n):
        lhs = apply_piece(p, df)
        rhs = p.zeta * apply_piece(p, f, derivative=True) - p.zeta * f0 / (np.pi * f.w)
        worst = np.maximum(worst, np.abs(lhs - rhs))
    return worst


def _identity(f):
    tdf = HalfLineFunction.like(f, f.w * f.derivative().values)
    lhs = hilbert_alpha(f.n, tdf)
    rhs = f.w * hilbert_alpha(f.n, f).derivative().values
    return lhs.values - rhs


_ALPHA = {"mult_by_w": _mult_by_w, "div_by_w": _div_by_w, "diff": _diff, "identity": _identity}
