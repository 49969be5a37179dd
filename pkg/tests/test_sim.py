import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from blowup1d.exact import ClmData, profile_clm
from blowup1d.funcspace import HalfLineFunction, LineFunction, PeriodicFunction
from blowup1d.sim import (BlowupReport, SimConfig, blowup_fit, collapse_metric, cusp_amplitude,
                          cusp_track, cusp_variable, rhs, rhs_toy, run, sup_and_argmax)
from blowup1d.sim.dynamics import Trajectory

X = np.linspace(-5, 5, 101)


def special(n=512):
    return LineFunction.from_function(lambda x: x / (1 + x * x), n, 1.0, "odd")


def special_rhs(a, x):
    # u_x = -Hw = 1/(1+x^2), u = arctan x: w_t = -a u w_x + 2 w u_x
    dw = (1 - x * x) / (1 + x * x) ** 2
    return -a * np.arctan(x) * dw + 2 * x / (1 + x * x) ** 2


def test_rhs_of_special_data():
    assert np.max(np.abs(rhs(special(), 0.0, 768)(X) - special_rhs(0.0, X))) < 1e-13
    # arctan does not decay, so the transport term converges algebraically
    err = [np.max(np.abs(rhs(special(n), 0.7, 3 * n // 2)(X) - special_rhs(0.7, X)))
           for n in (256, 512, 1024)]
    assert err[1] < 1e-7
    assert err[0] / err[1] > 6 and err[1] / err[2] > 6


def test_rhs_on_chebyshev_basis_matches_fourier():
    h = HalfLineFunction.from_function(lambda x: x / (1 + x * x), 1, 256)
    x = np.linspace(0, 5, 51)
    assert np.max(np.abs(rhs(h, 0.5)(x) - special_rhs(0.5, x))) < 1e-7


def test_toy_rhs_freezes_the_velocity():
    w = special()
    r = rhs_toy(w, 1.0)
    # Hw(0) = -1: w_t = -x w_x + 2 w
    dw = (1 - X * X) / (1 + X * X) ** 2
    assert np.max(np.abs(r(X) - (-X * dw + 2 * X / (1 + X * X)))) < 1e-10


@pytest.mark.parametrize("k", [1, 2, 3])
def test_sines_are_stationary_for_a_equal_two(k):
    p = PeriodicFunction.from_function(lambda x: np.sin(k * x), 64)
    assert np.max(np.abs(rhs(p, 2.0, 96).values)) < 1e-12


@given(st.floats(-2.0, 2.0))
def test_parity_and_mean_preserved_on_the_circle(a):
    p = PeriodicFunction.from_function(lambda x: np.sin(x) + 0.3 * np.sin(2 * x), 64)
    tr, _ = run(SimConfig(a=a, domain="circle", mode_count=64, t_max=0.05, dt_initial=0.01), p,
                report=False)
    w = tr.final.omega
    x = np.linspace(0.1, 3, 20)
    assert np.max(np.abs(w(x) + w(-x))) < 1e-12
    assert abs(w.mean) < 1e-14


def test_sup_and_argmax():
    s, x = sup_and_argmax(special())
    assert s == pytest.approx(0.5, abs=1e-12)
    assert abs(x) == pytest.approx(1.0, abs=1e-6)


def test_simulation_follows_the_closed_form():
    w0 = special()
    tr, rep = run(SimConfig(a=0.0, mode_count=512, safety=0.05, dt_initial=1.0, t_max=2.0,
                            snapshot_times=(0.5, 0.9)), w0)
    d = ClmData(w0)
    x = np.linspace(-20, 20, 401)
    for t, om in tr.snapshots.items():
        assert np.max(np.abs(om(x) - d.values(t, x)[0])) < 1e-4
    assert tr.status == "threshold"
    assert rep.claimed
    assert rep.t_star_fit == pytest.approx(1.0, rel=1e-2)
    assert rep.rate_exponent == pytest.approx(-1.0, abs=1e-2)


@given(st.floats(0.5, 2.0), st.floats(0.1, 10.0))
def test_blowup_fit_recovers_synthetic_law(ts, c):
    t = ts * (1 - np.geomspace(1, 1e-4, 60))
    hist = np.column_stack([t, c / (ts - t)])
    rep = blowup_fit(hist)
    assert rep.claimed
    assert rep.t_star_fit == pytest.approx(ts, rel=1e-6)
    assert rep.rate_exponent == pytest.approx(-1.0, abs=1e-6)


def test_blowup_fit_needs_growth_and_points():
    with pytest.raises(ValueError):
        blowup_fit(np.column_stack([np.linspace(0, 1, 5), np.ones(5)]))
    with pytest.raises(ValueError):
        blowup_fit(np.column_stack([np.linspace(0, 1, 50), np.ones(50)]))


def test_report_json_drops_nonfinite_values():
    d = json.loads(BlowupReport.empty("nothing").to_json())
    assert d["t_star_fit"] is None and d["message"] == "nothing"


def test_collapse_metric_vanishes_on_exact_self_similar_snapshots():
    p = profile_clm("smooth", 512)
    tr = Trajectory(SimConfig())
    for t in (0.0, 0.5, 0.9):
        # w(t, x) = F(x / (1 - t)) / (1 - t)
        tr.snapshots[t] = LineFunction.from_function(
            lambda x, s=1 - t: (x / s) / (1 + (x / s) ** 2) / s, 512, 1.0, "odd")
    m = collapse_metric(tr, p)
    assert len(m) == 3 and max(d for _, d in m) < 1e-10
    m0 = collapse_metric(tr, p, lam=0.2)
    assert m0[-1][1] > 1e-3


def test_collapse_metric_rejects_times_past_blowup():
    tr = Trajectory(SimConfig())
    tr.snapshots[1.0] = special()
    with pytest.raises(ValueError):
        collapse_metric(tr, profile_clm("smooth"))


@pytest.mark.parametrize("a", [0.5, 1.0, 1.5])
def test_cusp_variable_matches_quadrature(a):
    w = PeriodicFunction.from_function(lambda x: np.sin(x) * np.exp(0.2 * np.cos(x)), 128)
    x = np.array([0.05, 0.3, 1.0])
    got = cusp_variable(w, a, 1.0, x)
    want = [quad(lambda y: (np.sin(y) * np.exp(0.2 * np.cos(y))) ** (-a / 2), 0, xi)[0] for xi in x]
    assert np.allclose(got, want, rtol=1e-8)


@given(st.floats(0.5, 3.0), st.floats(0.2, 0.9))
def test_cusp_amplitude_of_a_pure_power(A, g):
    x = np.geomspace(0.01, 0.1, 16)
    assert cusp_amplitude(x, A * x ** g * np.exp(0.3 * x * x), g) == pytest.approx(A, rel=1e-10)


def test_cusp_amplitude_decreases_and_starts_at_oracle():
    a = 1.5
    w = PeriodicFunction.from_function(lambda x: np.sin(x) * np.exp(0.2 * np.cos(x)), 128)
    tr = cusp_track(SimConfig(a=a, domain="circle", mode_count=128, t_max=0.3, dt_initial=0.01), w)
    A = np.array([v for _, v in tr.A_values])
    assert tr.status == "completed" and tr.monotone
    # f ~ w'(0)^(-a/2) x^gamma / gamma
    assert A[0] == pytest.approx(np.exp(0.2) ** (-a / 2) / (1 - a / 2), rel=1e-3)


def test_cusp_tracker_validates_input():
    w = PeriodicFunction.from_function(np.sin, 64)
    with pytest.raises(ValueError):
        cusp_track(SimConfig(a=2.5, domain="circle", mode_count=64), w)
    with pytest.raises(ValueError):
        cusp_track(SimConfig(a=1.0, domain="line"), w)
    with pytest.raises(ValueError):
        cusp_track(SimConfig(a=1.0, domain="circle", mode_count=64),
                   PeriodicFunction.from_function(lambda x: np.sin(2 * x), 64))


@pytest.mark.parametrize("kw", [dict(domain="disk"), dict(dt_initial=0.0), dict(safety=2.0),
                                dict(mode_count=7), dict(basis="chebyshev", domain="circle"),
                                dict(model="toy", domain="circle"), dict(dealias_fraction=0.0)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        SimConfig(**kw)


def test_threshold_must_exceed_initial_sup():
    with pytest.raises(ValueError):
        SimConfig(blowup_threshold=0.1).threshold_for(0.5)


def test_trajectory_csv_output(tmp_path):
    tr, _ = run(SimConfig(a=0.0, mode_count=64, t_max=0.1, snapshot_times=(0.1,)), special(64),
                report=False)
    tr.to_csv(tmp_path)
    hist = np.loadtxt(tmp_path / "history.csv", delimiter=",", skiprows=1)
    assert hist.shape[1] == 6 and hist[-1, 0] == pytest.approx(0.1)
    assert (tmp_path / "snapshot_t0.100000.csv").exists()
