from fractions import Fraction
from math import log

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blowup1d.exact import profile_residual
from blowup1d.funcspace import HalfLineFunction, LineFunction, hilbert_alpha
from blowup1d.series import (Branch, ConsistencyError, apply_L, build_series, catalan,
                             consistency_value, decay_exponent, evaluate_profile, extend,
                             holder_exponent, invert_L, lambda_of, majorant_radius,
                             majorant_sequence, new_state, split_inverse)

N = 512


@pytest.fixture(scope="module")
def smooth8():
    return build_series("smooth", 8, N=256)


def odd(f):
    return LineFunction.from_function(f, N, 1.0, "odd")


def test_lambda1_is_ln4_minus_2():
    s = extend(new_state("smooth", 256))
    assert s.lambdas[1] == pytest.approx(log(4) - 2, abs=1e-6)


def test_first_order_rhs_oracle():
    # G_1 = K[F0] F0' = -arctan(z)(1 - z^2)/(1 + z^2)^2 and its consistency value
    # on the mapped Fourier grid the arctan factor is only Lipschitz at infinity,
    # so this converges like N^-2 (5e-5 at N = 256)
    n = 2048
    G1 = LineFunction.from_function(lambda x: -np.arctan(x) * (1 - x * x) / (1 + x * x) ** 2, n, 1.0, "odd")
    k = LineFunction.from_function(lambda x: x * (1 - x * x) / (1 + x * x) ** 2, n, 1.0, "odd")
    lam = consistency_value("smooth", G1) / consistency_value("smooth", k)
    assert lam == pytest.approx(log(4) - 2, abs=2e-6)


def test_kernel_element_is_annihilated():
    k = odd(lambda x: x * (1 - x * x) / (1 + x * x) ** 2)
    assert np.max(np.abs(apply_L("smooth", k).values)) <= 1e-8


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.5, 2.0))
def test_range_of_L_is_consistent(c1, c3, s):
    f = odd(lambda x: c1 * x / (1 + s * x * x) ** 2 + c3 * x ** 3 / (1 + s * x * x) ** 3)
    ell = consistency_value("smooth", apply_L("smooth", f))
    assert abs(ell) <= 1e-6 * max(np.max(np.abs(f.values)), 1e-300)


@given(st.floats(-2, 2), st.floats(0.5, 2.0))
def test_round_trip_smooth(c, s):
    f = odd(lambda x: x ** 3 / (1 + s * x * x) ** 3 + c * x ** 5 / (1 + s * x * x) ** 4)
    back = invert_L("smooth", apply_L("smooth", f))
    assert np.max(np.abs((back - f).values)) <= 1e-6 * max(1.0, np.max(np.abs(f.values)))


@pytest.mark.parametrize("n", [2, 3, 5])
def test_round_trip_hoelder(n):
    br = Branch(n, True)
    f = HalfLineFunction.from_function(lambda w: w ** 3 / (1 + w * w) ** 3, n, 256)
    back, hback = invert_L(br, apply_L(br, f), return_transform=True)
    keep = f.w < 1e3
    assert np.max(np.abs(back.values - f.values)[keep]) <= 1e-6
    assert np.max(np.abs(hback.values - hilbert_alpha(n, f).values)[keep]) <= 1e-6


def test_inconsistent_rhs_is_rejected():
    g = odd(lambda x: x * (1 - x * x) / (1 + x * x) ** 2)
    with pytest.raises(ConsistencyError):
        invert_L("smooth", g)


def test_split_inverse_sums_to_inverse():
    f = odd(lambda x: x ** 3 / (1 + x * x) ** 3)
    g = apply_L("smooth", f)
    parts = split_inverse("smooth", g)
    back = invert_L("smooth", g)
    xs = np.sort(back.x[back.x > 0])
    assert np.max(np.abs(parts["total"] - back(xs))) < 1e-8


@given(st.fractions(Fraction(1, 100), Fraction(5)))
def test_majorant_recursion_is_catalan(z):
    seq = majorant_sequence(z, 10)
    assert all(v == catalan(n) * z ** (n + 1) for n, v in enumerate(seq))


def test_majorant_radius_is_quarter_over_zeta():
    seq, r = majorant_radius(0.5, 6)
    assert r == 0.5
    assert seq == pytest.approx([catalan(n - 1) * 0.5 ** n for n in range(1, 7)])


def test_majorant_rejects_nonpositive_zeta():
    with pytest.raises(ValueError):
        majorant_sequence(0.0, 3)


def test_coefficients_stable_under_refinement(smooth8):
    fine = build_series("smooth", 8, N=512)
    assert np.allclose(smooth8.lambdas, fine.lambdas, atol=5e-6)
    assert np.allclose(smooth8.mus, fine.mus, rtol=2e-3)


def test_mu_roots_decrease(smooth8):
    mus = np.array(smooth8.mus)
    roots = mus[1:] ** (1 / np.arange(1, mus.size))
    assert np.all(np.diff(roots) < 0)
    assert not smooth8.stopped
    assert smooth8.radius_estimate > 0.1


def test_corrections_have_zero_slope_at_origin(smooth8):
    for f in smooth8.F[1:5]:
        assert abs(f.origin_slope) < 1e-6


@pytest.mark.parametrize("a", [-0.05, 0.05])
def test_profile_residual_and_decay(smooth8, a):
    p = evaluate_profile(smooth8, a)
    assert profile_residual(p) <= 1e-4
    assert decay_exponent(p) == pytest.approx(-1 / (1 + p.lam), rel=0.05)
    assert holder_exponent(smooth8, a) == pytest.approx(1 - 1 / (1 + p.lam))


def test_lambda_sign_matches_first_order(smooth8):
    assert lambda_of(smooth8, 0.05) < 0 < lambda_of(smooth8, -0.05)


def test_guard_rejects_a_outside_radius(smooth8):
    with pytest.raises(ValueError):
        lambda_of(smooth8, 10 * smooth8.radius_estimate)


@pytest.mark.parametrize("n", [2, 3])
def test_hoelder_series(n):
    s = build_series(f"holder(1/{n})", 4, N=256)
    assert s.order == 4 and not s.stopped
    p = evaluate_profile(s, 0.02)
    assert profile_residual(p) <= 1e-6
    assert decay_exponent(p) == pytest.approx(-1 / n / (1 + p.lam), rel=0.05)


def test_unknown_branch_is_rejected():
    with pytest.raises(ValueError):
        new_state("holder(2/3)")
