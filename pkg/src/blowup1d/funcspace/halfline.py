"""Functions of the tilde variable w = |z|^alpha on [0, inf), alpha = 1/n.

A Hoelder-class odd function f(z) = sgn(z) f~(|z|^alpha) is stored through f~,
sampled at Chebyshev points of the first kind in xi and mapped by
w = L (1 + xi) / (1 - xi)^p (p = MAP_POWER).  Neither endpoint is a node.

The conjugated Hilbert transform H~(n) f~(w) = Hf(w^n) has the kernel

    (1/pi) 2n t^(2n-1) / (w^(2n) - t^(2n)) = (1/pi) sum_{j=1}^{2n} zeta^j / (w - zeta^j t),

zeta = exp(i pi / n).  The pair j = n, 2n gives the principal-value piece
2t / (w^2 - t^2); the conjugate pairs (j, 2n - j) give smooth real kernels.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.fft import dct

DECAY_TOL = 1e-8


# w = L (1 + xi) / (1 - xi)^p.  The map is linear at w = 0; at infinity 1/w ~ (1 - xi)^p,
# so tails such as log(w)^k / w become C^(p-1) in xi instead of merely continuous.
MAP_POWER = 3

# derivatives on [0, PATCH_WIDTH * L] come from a local Chebyshev series of this degree
PATCH_WIDTH = 16.0
PATCH_DEGREE = 192


def _w_of_xi(xi, L):
    xi = np.asarray(xi, dtype=float)
    with np.errstate(divide="ignore"):
        return L * (1 + xi) / (1 - xi) ** MAP_POWER


def _dw_dxi(xi, L):
    p = MAP_POWER
    xi = np.asarray(xi, dtype=float)
    return L * ((1 - xi) + p * (1 + xi)) / (1 - xi) ** (p + 1)


@lru_cache(maxsize=32)
def _grid(N: int, L: float):
    theta = (2 * np.arange(N) + 1) * np.pi / (2 * N)
    xi = -np.cos(theta)  # increasing
    w = _w_of_xi(xi, L)
    # Fejer's first rule on [-1, 1]
    j = np.arange(1, N // 2 + 1)
    fw = 2.0 / N * (1 - 2 * np.sum(np.cos(2 * np.outer(theta, j)) / (4 * j ** 2 - 1), axis=1))
    qw = fw * _dw_dxi(xi, L)
    for arr in (xi, w, qw):
        arr.setflags(write=False)
    return xi, w, qw


def cheb_coeffs(values):
    """Chebyshev coefficients of samples given in increasing-xi order."""
    v = np.asarray(values)
    if np.iscomplexobj(v):
        return cheb_coeffs(v.real) + 1j * cheb_coeffs(v.imag)
    a = dct(v[::-1], type=2) / v.size
    a[0] /= 2
    return a


def cheb_values(a, N):
    """Inverse of cheb_coeffs: values at the N nodes, increasing xi."""
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return cheb_values(a.real, N) + 1j * cheb_values(a.imag, N)
    b = np.zeros(N)
    b[:min(N, a.size)] = a[:N]
    b[1:] /= 2
    return dct(b, type=3)[::-1]


def _xi_of_w(w, L):
    """Inverse map: y = 1 - xi solves w y^p + L y = 2L (Newton from the right)."""
    w = np.asarray(w, dtype=float)
    p = MAP_POWER
    out = np.ones_like(w)
    fin = np.isfinite(w)
    wf = np.maximum(w[fin], 0.0)
    if p == 1:
        out[fin] = (wf - L) / (wf + L)
        return out
    with np.errstate(divide="ignore"):
        y = np.minimum(2.0, (2 * L / wf) ** (1.0 / p))
    for _ in range(100):
        g = wf * y ** p + L * y - 2 * L
        step = g / (p * wf * y ** (p - 1) + L)
        y = y - step
        if np.all(np.abs(step) <= 4e-16 * np.maximum(y, 1e-300)):
            break
    out[fin] = 1 - y
    return out


def nodal_derivative(values, L):
    """d/dw of the Chebyshev interpolant, at the nodes."""
    N = len(values)
    xi, _, _ = _grid(N, L)
    d = cheb_values(C.chebder(cheb_coeffs(values)), N)
    return d / _dw_dxi(xi, L)


@dataclass(frozen=True, eq=False)
class HalfLineFunction:
    """f~ sampled on the mapped Chebyshev grid; alpha = 1/n."""

    n: int
    values: np.ndarray
    map_scale: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("alpha must be 1/n with n a positive integer")
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 4:
            raise ValueError("need at least 4 samples")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, func, n, N=256, map_scale=1.0):
        _, w, _ = _grid(N, float(map_scale))
        return cls(n, func(w), float(map_scale))

    @classmethod
    def like(cls, other, values):
        return cls(other.n, values, other.map_scale)

    @property
    def alpha(self) -> Fraction:
        return Fraction(1, self.n)

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def xi(self):
        return _grid(self.size, self.map_scale)[0]

    @property
    def w(self):
        return _grid(self.size, self.map_scale)[1]

    @property
    def weights(self):
        """Quadrature weights for int_0^inf dw at the nodes."""
        return _grid(self.size, self.map_scale)[2]

    @property
    def coefficients(self):
        return cheb_coeffs(self.values)

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        return C.chebval(_xi_of_w(w, self.map_scale), self.coefficients)

    def derivative_at_zero(self, order: int) -> float:
        """d^k f~/dw^k at w = 0 (xi = -1) for k = 0, 1, 2."""
        a = self.coefficients
        L, p = self.map_scale, MAP_POWER
        d = [C.chebval(-1.0, C.chebder(a, m)) if m else C.chebval(-1.0, a) for m in range(order + 1)]
        if order == 0:
            return float(d[0])
        # w'(-1) = L / 2^p and w''(-1) = p L / 2^p
        w1, w2 = L / 2 ** p, p * L / 2 ** p
        f1 = d[1] / w1
        if order == 1:
            return float(f1)
        if order == 2:
            return float((d[2] - f1 * w2) / w1 ** 2)
        raise ValueError("order must be 0, 1 or 2")

    @property
    def origin_value(self) -> float:
        return self.derivative_at_zero(0)

    @property
    def origin_slope(self) -> float:
        return self.derivative_at_zero(1)

    @property
    def at_infinity(self) -> float:
        return float(C.chebval(1.0, self.coefficients))

    def is_decaying(self, tol=DECAY_TOL) -> bool:
        scale = max(float(np.max(np.abs(self.values))), 1e-300)
        return abs(self.at_infinity) <= tol * scale or abs(self.at_infinity) < 1e-13

    def derivative(self) -> "HalfLineFunction":
        """d/dw, with the values on [0, PATCH_WIDTH] taken from a local interpolant.

        Slowly decaying tails leave algebraic Chebyshev coefficients, and
        differentiating them rings at the w = 0 end; near the origin the
        function is analytic, so a local series differentiates cleanly.
        """
        d = nodal_derivative(self.values, self.map_scale)
        W = PATCH_WIDTH * self.map_scale
        near = self.w <= W
        p = C.Chebyshev.interpolate(self, PATCH_DEGREE, domain=[0.0, W])
        d[near] = p.deriv()(self.w[near])
        return HalfLineFunction.like(self, d)

    def __add__(self, other):
        if isinstance(other, HalfLineFunction):
            self._check(other)
            return HalfLineFunction.like(self, self.values + other.values)
        return NotImplemented

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        if isinstance(other, HalfLineFunction):
            self._check(other)
            return HalfLineFunction.like(self, self.values * other.values)
        if np.isscalar(other):
            return HalfLineFunction.like(self, self.values * other)
        return NotImplemented

    __rmul__ = __mul__

    def times(self, func) -> "HalfLineFunction":
        return HalfLineFunction.like(self, self.values * func(self.w))

    def _check(self, other):
        if other.size != self.size or other.map_scale != self.map_scale:
            raise ValueError("incompatible grids")
        if other.n != self.n:
            raise ValueError("mismatched alpha")

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(self.weights * self.values ** 2)))

    def to_line(self, z):
        """Evaluate the induced odd line function sgn(z) f~(|z|^alpha)."""
        z = np.asarray(z, dtype=float)
        return np.sign(z) * self(np.abs(z) ** (1.0 / self.n))


def sobolev_norm_tilde(f: HalfLineFunction, s: int = 3) -> float:
    """H^s(R+) norm in the w variable."""
    if not 0 <= s <= 3:
        raise ValueError("s must be in 0..3")
    total, g = 0.0, f
    for k in range(s + 1):
        if k:
            g = g.derivative()
        total += g.l2_norm() ** 2
    return float(np.sqrt(total))


# ---------------------------------------------------------------------------
# interpolation rows and the Nystrom matrix of H~(n)


@lru_cache(maxsize=32)
def _dct_matrix(N):
    # maps nodal values (increasing xi) to Chebyshev coefficients
    return np.column_stack([cheb_coeffs(e) for e in np.eye(N)])


def interp_rows(targets, N, L, derivative=False):
    """Rows e with e @ values = f~(target) (or f~'(target))."""
    xi = _xi_of_w(targets, L)
    M = _dct_matrix(N)
    if derivative:
        V = np.stack([C.chebval(xi, C.chebder(e)) for e in np.eye(N)], axis=-1)
        V = V / _dw_dxi(xi, L)[:, None]
    else:
        V = C.chebvander(xi, N - 1)
    return V @ M


def _pair_kernel(n, w, t):
    # sum over conjugate pairs j, 2n - j (1 <= j <= n - 1), already real
    K = np.zeros(np.broadcast(w, t).shape)
    for j in range(1, n):
        c = np.cos(j * np.pi / n)
        K += 2 * (c * w - t) / (w ** 2 - 2 * c * w * t + t ** 2)
    return K


def hilbert_alpha_matrix(n: int, N: int, L: float = 1.0, targets=None):
    """Matrix M with (H~(n) f~)(targets) = M @ f~(nodes).

    The integral is taken over the Chebyshev interpolant with the trapezoid
    rule in u = ln t, offset by half a step from ln w.  The kernel is
    dilation invariant, so its near-singular structure at t ~ w sits at a
    fixed distance pi/n from the real u-axis for every target.

    The p.v. point is removed with phi_w(t) = F0~(t/w) / F0~(1), whose
    transform at w is -(1 + cos(pi/2n)) / sin(pi/2n) exactly.
    """
    key = None if targets is None else tuple(np.atleast_1d(np.asarray(targets, float)))
    return _hilbert_matrix_cached(int(n), int(N), float(L), key)


_LOG_STEP = 0.04
_LOG_REACH = 38.0


def _log_rule(w, L):
    """Trapezoid points and weights (for dt) in u = ln t, half a step off ln w."""
    lw = np.log(w)
    lo = min(lw, np.log(L)) - _LOG_REACH
    hi = max(lw, np.log(L)) + _LOG_REACH
    m = np.arange(np.floor((lo - lw) / _LOG_STEP), np.ceil((hi - lw) / _LOG_STEP))
    t = np.exp(lw + (m + 0.5) * _LOG_STEP)
    return t, _LOG_STEP * t


def _functional_row(t, a, N, L):
    """Row r with r @ values = sum_k a_k f~(t_k) for the Chebyshev interpolant."""
    V = C.chebvander(_xi_of_w(t, L), N - 1)
    if np.iscomplexobj(a):
        return (a.real @ V + 1j * (a.imag @ V)) @ _dct_matrix(N)
    return (a @ V) @ _dct_matrix(N)


@lru_cache(maxsize=64)
def _hilbert_matrix_cached(n, N, L, targets):
    _, t, q = _grid(N, L)
    W = t if targets is None else np.asarray(targets, float)
    out = np.zeros((W.size, N))
    c, s = np.cos(np.pi / (2 * n)), np.sin(np.pi / (2 * n))
    for i, w in enumerate(W):
        if w == 0:
            out[i] = -(2 * n / np.pi) * q / t
            continue
        tu, a = _log_rule(w, L)
        a = a * (2 * tu / (w ** 2 - tu ** 2) + _pair_kernel(n, w, tu)) / np.pi
        phi = (2 + 2 * c) * tu * w / (w ** 2 + 2 * c * tu * w + tu ** 2)
        shift = -np.sum(a * phi) - (1 + c) / s
        out[i] = _functional_row(tu, a, N, L) + shift * interp_rows(np.array([w]), N, L)[0]
    return out


@lru_cache(maxsize=32)
def _diff_matrix(N, L):
    return np.column_stack([nodal_derivative(e, L) for e in np.eye(N)])


def hilbert_alpha(n: int, f: HalfLineFunction, strict: bool = True) -> HalfLineFunction:
    """H~(n) f~ at the grid nodes (sum of the p.v. piece and the paired pieces).

    strict=False skips the decay test, for data whose slow tails (log(w)^k / w)
    extrapolate to a small nonzero value at w = inf.
    """
    _check_alpha(n, f, strict)
    M = hilbert_alpha_matrix(n, f.size, f.map_scale)
    return HalfLineFunction.like(f, M @ f.values)


def hilbert_alpha_at(n: int, f: HalfLineFunction, w) -> np.ndarray:
    """H~(n) f~ evaluated directly at arbitrary points w >= 0."""
    _check_alpha(n, f)
    w = np.atleast_1d(np.asarray(w, float))
    return hilbert_alpha_matrix(n, f.size, f.map_scale, w) @ f.values


def hilbert_alpha_at_zero(n: int, f: HalfLineFunction) -> float:
    """H~f~(0) = -(2n/pi) int_0^inf f~(t)/t dt."""
    return float(-(2 * n / np.pi) * np.sum(f.weights * f.values / f.w))


def _check_alpha(n, f, strict=True):
    if int(n) != n or n < 1:
        raise ValueError("alpha must be 1/n")
    if f.n != n:
        raise ValueError(f"function has alpha=1/{f.n}, transform requested for 1/{n}")
    if strict and not f.is_decaying():
        raise ValueError("transform of a non-decaying function")


# ---------------------------------------------------------------------------
# kernel pieces


@dataclass(frozen=True)
class KernelPiece:
    """Piece j of H~(n); j = 0 is the principal-value piece."""

    n: int
    j: int

    def __post_init__(self):
        if self.n < 1 or not (self.j == 0 or 1 <= abs(self.j) <= self.n - 1):
            raise ValueError("need j = 0 or 1 <= |j| <= n-1")

    @property
    def zeta(self) -> complex:
        return np.exp(1j * self.j * np.pi / self.n)

    def kernel(self, w, t):
        if self.j == 0:
            return 2 * t / (w ** 2 - t ** 2) / np.pi
        z = self.zeta
        return z / (w - z * t) / np.pi


def apply_piece(piece: KernelPiece, f: HalfLineFunction, w=None, derivative=False) -> np.ndarray:
    """H~_j f~ at the nodes (or at given points w > 0); complex for j != 0.

    With derivative=True returns d/dw H~_j f~ through the differentiated
    kernel, which stays accurate where H~_j f~ has w log w behaviour.
    """
    W = f.w if w is None else np.atleast_1d(np.asarray(w, float))
    if piece.j == 0:
        if derivative:
            raise ValueError("derivative only for the nonsingular pieces")
        return hilbert_alpha_matrix(1, f.size, f.map_scale, W) @ f.values
    kind = "dw" if derivative else "plain"
    return _piece_matrix(piece.n, piece.j, f.size, f.map_scale, tuple(W), kind) @ f.values


def piece_difference_from_zero(piece: KernelPiece, f: HalfLineFunction, w=None) -> np.ndarray:
    """H~_j f~(w) - H~_j f~(0) through the combined kernel w / (t (w - zeta t)).

    Both terms are finite only when f~(0) = 0.
    """
    if piece.j == 0:
        raise ValueError("only for the nonsingular pieces")
    if abs(f.origin_value) > 1e-8 * max(1.0, float(np.max(np.abs(f.values)))):
        raise ValueError("needs f~(0) = 0")
    W = f.w if w is None else np.atleast_1d(np.asarray(w, float))
    return _piece_matrix(piece.n, piece.j, f.size, f.map_scale, tuple(W), "from_zero") @ f.values


@lru_cache(maxsize=64)
def _piece_matrix(n, j, N, L, targets, kind):
    z = np.exp(1j * j * np.pi / n)
    out = np.zeros((len(targets), N), dtype=complex)
    for i, w in enumerate(targets):
        if w <= 0:
            raise ValueError("piece evaluation needs w > 0")
        t, a = _log_rule(w, L)
        if kind == "from_zero":
            k = w / (t * (w - z * t))
        elif kind == "dw":
            k = -z / (w - z * t) ** 2
        else:
            k = z / (w - z * t)
        out[i] = _functional_row(t, a * k / np.pi, N, L)
    return out


# ---------------------------------------------------------------------------
# weighted antiderivatives


_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def cumulative_integral(func, nodes, L=1.0):
    """int_0^{w_k} func(s) ds for increasing nodes w_k > 0.

    Each gap between consecutive nodes is one Gauss-Legendre panel in xi, so
    func is only ever evaluated strictly inside (0, w_max).
    """
    nodes = np.asarray(nodes, float)
    xi = _xi_of_w(nodes, L)
    left = np.concatenate([[-1.0], xi[:-1]])
    mid = 0.5 * (left + xi)
    half = 0.5 * (xi - left)
    xs = mid[:, None] + half[:, None] * _GL_X[None, :]
    ws = _w_of_xi(xs, L)
    jac = _dw_dxi(xs, L)
    vals = func(ws.ravel()).reshape(ws.shape)
    panel = np.sum(vals * jac * _GL_W[None, :], axis=1) * half
    return np.cumsum(panel)


def lambda_inv_alpha(n: int, f: HalfLineFunction) -> np.ndarray:
    """Nodal values of int_0^w H~f~(t) n t^(n-1) dt (grows like w^(n-1) for n > 1).

    Returned as an array because the result is generally unbounded in w.
    """
    _check_alpha(n, f)
    hf = hilbert_alpha(n, f)
    return cumulative_integral(lambda s: hf(s) * n * s ** (n - 1), f.w, f.map_scale)


def weighted_average_lambda(n: int, f: HalfLineFunction, strict: bool = True) -> HalfLineFunction:
    """alpha w^(1 - 1/alpha) Lambda~^{-1} f~ = w^(1-n) int_0^w H~f~(t) t^(n-1) dt.

    This is the combination that multiplies f~' when z-derivatives are written
    in the tilde variable; it is bounded in w for n >= 2.

    The nodal values are accurate for w up to about 1e6 L.  At the few nodes
    beyond, the transform is at its absolute roundoff floor eps and the
    integral picks up about eps * w, so evaluate the result at its nodes (as
    the products in the series and the simulator do) rather than off-grid.
    """
    _check_alpha(n, f, strict)
    hf = hilbert_alpha(n, f, strict)
    w = f.w
    I = cumulative_integral(lambda s: hf(s) * s ** (n - 1), w, f.map_scale)
    return HalfLineFunction.like(f, I * w ** (1 - n))


# ---------------------------------------------------------------------------
# operator norm


def operator_norm_estimate(n: int, trials: int = 4, N: int = 384, L: float = 1.0,
                           modes: int | None = None, iters: int = 200, seed: int = 0) -> float:
    """Lower estimate of ||H~(n)||_{L^2(R+) -> L^2(R+)}.

    Power iteration on the weighted Nystrom matrix, restricted to the span of
    the lowest Chebyshev modes so that only resolved functions are probed.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    modes = N // 3 if modes is None else modes
    xi, w, q = _grid(N, L)
    M = hilbert_alpha_matrix(n, N, L)
    s = np.sqrt(q)
    A = s[:, None] * M / s[None, :]
    # orthonormal basis (discrete L2) of low-degree polynomials in xi, times a 1/w-type decay
    B = C.chebvander(xi, modes - 1) * ((1 - xi) ** MAP_POWER)[:, None]
    Q, _ = np.linalg.qr(s[:, None] * B)
    AQ = A @ Q
    G = AQ.T @ AQ
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(trials):
        v = rng.standard_normal(modes)
        v /= np.linalg.norm(v)
        lam = 0.0
        for _ in range(iters):
            u = G @ v
            lam_new = float(v @ u)
            v = u / np.linalg.norm(u)
            if abs(lam_new - lam) <= 1e-12 * max(lam_new, 1.0):
                lam = lam_new
                break
            lam = lam_new
        best = max(best, np.sqrt(lam))
    return float(best)
