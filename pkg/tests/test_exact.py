import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blowup1d.exact import (ClmData, HolderSeedData, clm_blowup_time, clm_evolve, collapse_extract,
                            profile_clm, profile_residual, toy_constants, toy_evolve)
from blowup1d.funcspace import LineFunction

X = np.linspace(-20, 20, 801)


def special():
    return ClmData.from_function(lambda x: x / (1 + x * x), 512)


def test_special_data_closed_form():
    # Hw0 = -1/(1+x^2) gives w(t) = x / ((1 - t)^2 + x^2)
    d = special()
    for t in (0.3, 0.9):
        w, h = d.values(t, X)
        assert np.max(np.abs(w - X / ((1 - t) ** 2 + X * X))) < 1e-12
        assert np.max(np.abs(h + (1 - t) / ((1 - t) ** 2 + X * X))) < 1e-12


def test_special_data_blows_up_at_one():
    bt = clm_blowup_time(special())
    assert bt.time == pytest.approx(1.0, abs=1e-12)
    assert bt.location == 0.0


@given(st.floats(0.2, 3.0), st.floats(0.3, 3.0))
def test_blowup_time_scales_with_amplitude(c, s):
    # w0 = c x/(1 + s^2 x^2): Hw0(0) = -c/s, so t* = s/c
    d = ClmData.from_function(lambda x: c * x / (1 + s * s * x * x), 512)
    assert clm_blowup_time(d).time == pytest.approx(s / c, rel=1e-8)


def test_global_data_reports_infinite_time():
    # -w0 has Hw0(0) > 0 and no other zero
    d = ClmData.from_function(lambda x: -x / (1 + x * x), 256)
    assert not clm_blowup_time(d).finite


def test_closed_form_satisfies_the_equation():
    d = ClmData.from_function(lambda x: x / (1 + x * x) + x ** 3 / (1 + x * x) ** 3, 512)
    ts = clm_blowup_time(d).time
    dt = 1e-5
    for t in (0.1, 0.5, 0.9 * ts):
        w, h = clm_evolve(d, t)
        # the second component is the Hilbert transform of the first
        assert np.max(np.abs(w.hilbert()(X) - h(X))) < 1e-6
        dw = (d.values(t + dt, X)[0] - d.values(t - dt, X)[0]) / (2 * dt)
        assert np.max(np.abs(dw + 2 * w(X) * h(X))) < 1e-4


def test_clm_evolve_rejects_times_past_blowup():
    with pytest.raises(ValueError):
        clm_evolve(special(), 1.0)
    with pytest.raises(ValueError):
        clm_evolve(special(), -0.1)


def test_clm_data_must_be_odd():
    with pytest.raises(ValueError):
        ClmData(LineFunction.from_function(lambda x: 1 / (1 + x * x), 64, 1.0, "even"))


@pytest.mark.parametrize("a", [0.0, 1.0, 2.0])
def test_toy_closed_form_solves_the_toy_equation(a):
    w0 = LineFunction.from_function(lambda x: x / (1 + x * x) ** 2, 512, 1.0, "odd")
    c0, ts = toy_constants(w0)
    assert c0 == pytest.approx(0.5, abs=1e-12) and ts == pytest.approx(1.0)
    t, dt = 0.3, 1e-5
    x = np.linspace(-5, 5, 201)
    wp, wm, w = toy_evolve(w0, a, t + dt), toy_evolve(w0, a, t - dt), toy_evolve(w0, a, t)
    # w_t = a Hw(0) x w_x - 2 Hw(0) w with Hw(t, 0) = -c0 / (1 - 2 c0 t)
    h0 = -c0 / (1 - 2 * c0 * t)
    lhs = (wp(x) - wm(x)) / (2 * dt)
    rhs = a * h0 * x * w.derivative()(x) - 2 * h0 * w(x)
    assert np.max(np.abs(lhs - rhs)) < 1e-5


def test_toy_rejects_sign_changing_data():
    w0 = LineFunction.from_function(lambda x: np.sin(x) * np.exp(-x * x), 256, 1.0, "odd")
    with pytest.raises(ValueError):
        toy_evolve(w0, 1.0, 0.1)


@pytest.mark.parametrize("kind,tol", [("smooth", 1e-8), ("holder(1/2)", 1e-6), ("holder(1/3)", 1e-6),
                                      ("holder(1/5)", 1e-6)])
def test_profile_residuals(kind, tol):
    assert profile_residual(profile_clm(kind, 256)) <= tol


def test_profile_kind_is_validated():
    with pytest.raises(ValueError):
        profile_clm("holder(2/3)")


def test_collapse_of_special_data_is_exact():
    c = collapse_extract(special(), 0.99)
    assert c.distance <= 1e-2
    assert c.t_star == pytest.approx(1.0)


def test_collapse_distance_decreases_for_perturbed_data():
    d = ClmData.from_function(lambda x: x / (1 + x * x) + x ** 3 / (1 + x * x) ** 3, 512)
    ts = clm_blowup_time(d).time
    dist = [collapse_extract(d, f * ts).distance for f in (0.9, 0.99, 0.999)]
    assert dist[0] > dist[1] > dist[2]


def test_collapse_rejects_early_times():
    with pytest.raises(ValueError):
        collapse_extract(special(), 0.5)


def test_hoelder_seed_constants():
    h = HolderSeedData.from_function(lambda x: 1 / (1 + x * x), 2)
    assert h.C < 0
    # Omega2(0) = cot(alpha pi / 2) = 1 for alpha = 1/2
    assert h.omega2_at_zero == pytest.approx(1.0, abs=1e-6)
    assert h.cot_constant == pytest.approx(1.0, abs=1e-6)


def test_hoelder_seed_collapse_matches_profile_near_origin():
    h = HolderSeedData.from_function(lambda x: 1 / (1 + x * x), 2)
    c = collapse_extract(h, 0.99 * (-1 / h.C))
    assert c.distance <= 0.1


def test_hoelder_seed_rejects_bad_alpha():
    with pytest.raises(ValueError):
        HolderSeedData.from_function(lambda x: 1 / (1 + x * x), 1)
