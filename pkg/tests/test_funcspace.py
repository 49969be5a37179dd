import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blowup1d.funcspace import (IDENTITY_KINDS, HalfLineFunction, LineFunction, PeriodicFunction,
                                hardy_average, hilbert_alpha, hilbert_alpha_at_zero,
                                identity_residual, operator_norm_estimate, power_cutoff,
                                pv_cot_constant, sharp_constant, sobolev_norm,
                                weighted_average_lambda)

N = 256
X = np.linspace(-8, 8, 161)


def line(f, parity="odd", n=N):
    return LineFunction.from_function(f, n, 1.0, parity)


odd_rational = st.tuples(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.5, 2.0))


def make_odd(c):
    c1, c3, s = c
    return lambda x: c1 * x / (1 + s * x * x) + c3 * x ** 3 / (1 + s * x * x) ** 3


def test_hilbert_of_the_basic_pair():
    # H[x/(1+x^2)] = -1/(1+x^2) with Hf = (1/pi) p.v. int f(t)/(x-t) dt
    h = line(lambda x: x / (1 + x * x)).hilbert()
    assert np.max(np.abs(h(X) + 1 / (1 + X * X))) < 1e-12


def test_hilbert_of_the_even_partner():
    h = line(lambda x: 1 / (1 + x * x), "even").hilbert()
    assert np.max(np.abs(h(X) - X / (1 + X * X))) < 1e-12


@given(odd_rational)
def test_hilbert_squared_is_minus_identity(c):
    f = line(make_odd(c))
    assert np.max(np.abs(f.hilbert().hilbert()(X) + f(X))) < 1e-10


@given(odd_rational)
def test_lambda_inverse_differentiates_to_hilbert(c):
    f = line(make_odd(c))
    g = f.lambda_inv()
    assert abs(g(0.0)) < 1e-12
    assert np.max(np.abs(g.derivative()(X) - f.hilbert()(X))) < 1e-8


def test_boundary_data_of_the_basic_profile():
    b = line(lambda x: x / (1 + x * x)).boundary_data()
    assert b["f0"] == pytest.approx(0, abs=1e-12)
    assert b["f1"] == pytest.approx(1, abs=1e-12)
    assert b["Hf0"] == pytest.approx(-1, abs=1e-12)


@pytest.mark.parametrize("k", [1, 2, 5])
def test_periodic_hilbert_of_sines(k):
    p = PeriodicFunction.from_function(lambda x: np.sin(k * x), 64)
    x = np.linspace(0, 2 * np.pi, 50)
    assert np.max(np.abs(p.hilbert()(x) + np.cos(k * x))) < 1e-13
    assert np.max(np.abs(p.lambda_inv()(x) + np.sin(k * x) / k)) < 1e-13


@pytest.mark.parametrize("n", [2, 3, 5])
def test_cot_constant(n):
    a = 1.0 / n
    assert pv_cot_constant(a) == pytest.approx(np.pi / np.tan(a * np.pi / 2), abs=1e-6)


def test_cot_constant_rejects_alpha_outside_range():
    with pytest.raises(ValueError):
        pv_cot_constant(1.0)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_hoelder_profile_pair(n):
    a = np.pi / (2 * n)
    s, c = np.sin(a), np.cos(a)
    F = HalfLineFunction.from_function(lambda w: s * w / (1 + 2 * c * w + w * w), n, N)
    w = np.linspace(0, 10, 201)
    want = -(1 + c * w) / (1 + 2 * c * w + w * w)
    assert np.max(np.abs(hilbert_alpha(n, F)(w) - want)) < 1e-8
    assert hilbert_alpha_at_zero(n, F) == pytest.approx(-1, abs=1e-8)


def test_hilbert_alpha_matches_line_transform_for_alpha_one():
    f = lambda x: x * np.exp(-x * x)
    F = HalfLineFunction.from_function(f, 1, N)
    w = np.linspace(0, 5, 51)
    ref = line(f, n=1024).hilbert()(w)
    assert np.max(np.abs(hilbert_alpha(1, F)(w) - ref)) < 1e-8


def test_weighted_average_for_alpha_one_is_lambda_inverse():
    F = HalfLineFunction.from_function(lambda w: w / (1 + w * w), 1, N)
    K = weighted_average_lambda(1, F, strict=False)
    # Lambda^-1 [z/(1+z^2)] = int_0^z -1/(1+s^2) ds = -arctan(z), checked at the nodes
    keep = K.w <= 1e6
    assert np.max(np.abs(K.values + np.arctan(K.w))[keep]) < 1e-8


@pytest.mark.parametrize("n", [2, 3])
def test_weighted_average_limit_for_hoelder_profiles(n):
    # H~F ~ -cos(pi/2n)/w at infinity, so w^(1-n) int_0^w H~F t^(n-1) -> -cos(pi/2n)/(n-1)
    a = np.pi / (2 * n)
    s, c = np.sin(a), np.cos(a)
    F = HalfLineFunction.from_function(lambda w: s * w / (1 + 2 * c * w + w * w), n, N)
    K = weighted_average_lambda(n, F, strict=False)
    k = np.argmin(np.abs(K.w - 1e5))
    # near 0, K ~ H~F(0) w / n = -w / n
    assert K.values[0] == pytest.approx(-K.w[0] / n, rel=1e-3)
    assert K.values[k] == pytest.approx(-c / (n - 1), rel=1e-3)


@pytest.mark.parametrize("kind", [k for k in IDENTITY_KINDS if k not in ("tricomi", "multip_z", "divid_z")])
@pytest.mark.parametrize("n", [2, 3])
def test_commutation_identities(kind, n):
    f = HalfLineFunction.from_function(lambda w: w * np.exp(-w), n, N)
    assert identity_residual(kind, f) < 1e-8


@given(odd_rational, odd_rational)
def test_tricomi_identity(c, d):
    f, g = line(make_odd(c)), line(make_odd(d))
    assert identity_residual("tricomi", f, g) < 1e-8


@pytest.mark.parametrize("sigma", [0, 1, 2, 3])
@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0))
def test_hardy_ratio_below_sharp_constant(sigma, b, s):
    f = HalfLineFunction.from_function(lambda w: w * np.exp(-b * w) / (1 + s * w * w), 1, N)
    _, ratio = hardy_average(f, sigma)
    assert 0 < ratio < sharp_constant(sigma)


def test_hardy_near_extremal_input():
    _, ratio = hardy_average(power_cutoff(0, 0.02), 0)
    assert 0.9 * sharp_constant(0) <= ratio < sharp_constant(0)


def test_sharp_constants():
    assert sharp_constant(0) == 2.0
    assert sharp_constant(3) == pytest.approx(2 / 7)


def test_operator_norm_grows_linearly():
    r = [operator_norm_estimate(n) / n for n in (2, 4, 8)]
    assert max(r) <= 1.2 * r[0]


def test_sobolev_norm_of_profile():
    # ||F||_{H^3}^2 on the line for x/(1+x^2): sum of pi/2 * (1, 1/4, 3/8... ) computed by quadrature
    from scipy.integrate import quad
    f = line(lambda x: x / (1 + x * x), n=512)
    d = [lambda x: x / (1 + x * x), lambda x: (1 - x * x) / (1 + x * x) ** 2,
         lambda x: 2 * x * (x * x - 3) / (1 + x * x) ** 3,
         lambda x: -6 * (x ** 4 - 6 * x * x + 1) / (1 + x * x) ** 4]
    want = np.sqrt(sum(quad(lambda x: g(x) ** 2, -np.inf, np.inf)[0] for g in d))
    assert sobolev_norm(f, 3) == pytest.approx(want, rel=1e-6)


def test_mismatched_grids_are_rejected():
    f = line(lambda x: x / (1 + x * x), n=64)
    g = line(lambda x: x / (1 + x * x), n=128)
    with pytest.raises(ValueError):
        f + g
