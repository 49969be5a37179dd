"""Right-hand side, RK4 stepping and the driver loop.

u = -Lambda^{-1} omega, so u_x = -H omega and

    omega_t = -a u omega_x + 2 omega u_x = -a u omega_x - 2 omega H omega.

Quadratic products are formed on a padded grid and truncated back.  On the
Chebyshev half-line basis (odd data stored for x >= 0) the products are
pointwise at the collocation nodes.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from ..funcspace import (HalfLineFunction, LineFunction, PeriodicFunction, hilbert_alpha,
                         hilbert_alpha_at_zero, sobolev_norm, sobolev_norm_tilde,
                         weighted_average_lambda)
from ..funcspace.halfline import _w_of_xi
from ..funcspace.line import _prod_parity, x_of_theta
from .config import REMAP_FRACTION, STALL_DT, SimConfig, SimState

log = logging.getLogger(__name__)

HISTORY_FIELDS = ("t", "sup_norm", "argmax", "h3_norm", "dt", "map_scale")


# ---------------------------------------------------------------------------
# products


def _pad_periodic(f: PeriodicFunction, m: int) -> np.ndarray:
    c = np.zeros(m // 2 + 1, complex)
    k = min(c.size, f.fourier_modes.size)
    c[:k] = f.fourier_modes[:k]
    return np.fft.irfft(c * m, m)


def _truncate_periodic(values: np.ndarray, n: int) -> PeriodicFunction:
    c = np.fft.rfft(values) / values.size
    out = np.zeros(n // 2 + 1, complex)
    out[:] = c[:n // 2 + 1]
    out[-1] = out[-1].real
    return PeriodicFunction(out)


def _product(f, g, m):
    """f * g, formed on m >= mode_count points."""
    if isinstance(f, PeriodicFunction):
        n = f.mode_count
        if m == n:
            return f * g
        return _truncate_periodic(_pad_periodic(f, m) * _pad_periodic(g, m), n)
    n = f.mode_count
    par = _prod_parity(f.parity, g.parity)
    if m == n:
        return LineFunction.from_values(f.values * g.values, f.map_scale, par)
    p = LineFunction.from_values(f.resample(m).values * g.resample(m).values, f.map_scale, par)
    return p.resample(n)


# ---------------------------------------------------------------------------
# right-hand sides


def velocity(omega):
    """(u, u_x) = (-Lambda^{-1} omega, -H omega)."""
    if isinstance(omega, HalfLineFunction):
        return (-1.0 * weighted_average_lambda(1, omega, strict=False),
                -1.0 * hilbert_alpha(1, omega, strict=False))
    return -1.0 * omega.lambda_inv(), -1.0 * omega.hilbert()


def rhs(omega, a: float, padded: int | None = None):
    """-a u omega_x + 2 omega u_x with dealiased products."""
    if isinstance(omega, HalfLineFunction):
        u, ux = velocity(omega)
        v = 2.0 * omega.values * ux.values
        if a:
            v = v - a * u.values * omega.derivative().values
        return HalfLineFunction.like(omega, v)
    m = omega.mode_count if padded is None else padded
    u, ux = velocity(omega)
    stretch = _product(omega, ux, m)
    if a == 0:
        return 2.0 * stretch
    return 2.0 * stretch - a * _product(u, omega.derivative(), m)


def h_at_origin(omega) -> float:
    if isinstance(omega, HalfLineFunction):
        return float(hilbert_alpha_at_zero(1, omega))
    return float(omega.hilbert().theta_derivative_at(np.pi, 0)[0])


def rhs_toy(omega: LineFunction, a: float, padded: int | None = None):
    """Coefficients frozen at x = 0: a H omega(0) x omega_x - 2 H omega(0) omega."""
    h0 = h_at_origin(omega)
    if isinstance(omega, HalfLineFunction):
        x_dx = omega.derivative().times(lambda x: x)
    else:
        x_dx = omega.derivative().times(lambda x: x, parity=omega.parity)
    return a * h0 * x_dx - 2 * h0 * omega


# ---------------------------------------------------------------------------
# diagnostics on one field


def sup_and_argmax(omega):
    """(max |omega|, |x| at the maximum), refined between nodes."""
    if isinstance(omega, PeriodicFunction):
        v = omega.values
        j = int(np.argmax(np.abs(v)))
        h = 2 * np.pi / omega.mode_count
        r = minimize_scalar(lambda s: -abs(float(omega(np.array([s]))[0])),
                            bounds=(omega.x[j] - h, omega.x[j] + h), method="bounded",
                            options={"xatol": 1e-12})
        x = (r.x + np.pi) % (2 * np.pi) - np.pi
        return float(-r.fun), float(abs(x))
    if isinstance(omega, HalfLineFunction):
        xi, w = omega.xi, omega.w
        j = int(np.argmax(np.abs(omega.values)))
        lo, hi = max(j - 1, 0), min(j + 1, w.size - 1)
        # search in xi, where the nodes are evenly spread
        L = omega.map_scale
        r = minimize_scalar(lambda q: -abs(float(omega(_w_of_xi(np.array([q]), L))[0])),
                            bounds=(xi[lo] if lo < j else -1.0 + 1e-12, xi[hi] if hi > j else 1 - 1e-12),
                            method="bounded", options={"xatol": 1e-13})
        return float(-r.fun), float(_w_of_xi(r.x, L))
    v = omega.values
    v[0] = 0.0
    j = int(np.argmax(np.abs(v)))
    th = omega.theta
    h = th[1] - th[0]

    def neg(s):
        val = omega.theta_derivative_at(s, 0)[0]
        if omega.ramp:
            val += omega.ramp * (s - np.pi) / np.pi
        return -abs(val)

    r = minimize_scalar(neg, bounds=(max(th[j] - h, 1e-9), th[j] + h), method="bounded",
                        options={"xatol": 1e-13})
    return float(-r.fun), float(abs(x_of_theta(r.x, omega.map_scale)))


def h3_surrogate(omega) -> float:
    if isinstance(omega, HalfLineFunction):
        # both halves of the odd function
        return float(np.sqrt(2) * sobolev_norm_tilde(omega, 3))
    if isinstance(omega, PeriodicFunction):
        k = np.arange(omega.fourier_modes.size, dtype=float)
        w = np.full(k.size, 2.0)
        w[0] = w[-1] = 1.0
        s = 1 + k ** 2 + k ** 4 + k ** 6
        return float(np.sqrt(2 * np.pi * np.sum(w * s * np.abs(omega.fourier_modes) ** 2)))
    return sobolev_norm(omega, 3)


def _step_limits(omega, a, model="full"):
    """(1 / ||H omega||, grid CFL time for a u); frozen coefficients for the toy model."""
    if model == "toy":
        h0 = abs(h_at_origin(omega))
        if h0 == 0:
            return np.inf, np.inf
        th = omega.theta[1:]
        # |x| / dx = |cot(theta/2)| sin(theta/2)^2 / dtheta = |sin(theta)| / (2 dtheta) at most
        ratio = float(np.max(np.abs(np.sin(th)))) * omega.mode_count / (4 * np.pi)
        return 1.0 / h0, (np.inf if a == 0 else 1.0 / (abs(a) * h0 * ratio))
    u, ux = velocity(omega)
    hmax = float(np.max(np.abs(ux.values)))
    stretch = np.inf if hmax == 0 else 1.0 / hmax
    if a == 0:
        return stretch, np.inf
    uv = np.abs(u.values)
    if isinstance(omega, HalfLineFunction):
        w = omega.w
        gaps = np.diff(np.concatenate([[0.0], w]))
        dx = np.minimum(gaps, np.concatenate([gaps[1:], [np.inf]]))
    elif isinstance(omega, PeriodicFunction):
        dx = np.full(uv.size, 2 * np.pi / omega.mode_count)
    else:
        th = omega.theta[1:]
        dx = np.full(uv.size, np.inf)
        dx[1:] = omega.map_scale / (2 * np.sin(th / 2) ** 2) * (2 * np.pi / omega.mode_count)
    with np.errstate(divide="ignore", over="ignore"):
        cfl = float(np.min(np.where(uv > 0, dx / (abs(a) * uv), np.inf)))
    return stretch, cfl


# ---------------------------------------------------------------------------
# stepping


def rk4_step(omega, dt, f):
    k1 = f(omega)
    k2 = f(omega + (0.5 * dt) * k1)
    k3 = f(omega + (0.5 * dt) * k2)
    k4 = f(omega + dt * k3)
    return omega + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass
class Trajectory:
    config: SimConfig
    history: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)
    status: str = "running"
    message: str = ""
    final: SimState | None = None

    @property
    def table(self) -> np.ndarray:
        return np.array(self.history, float).reshape(-1, len(HISTORY_FIELDS))

    def column(self, name):
        return self.table[:, HISTORY_FIELDS.index(name)]

    def to_csv(self, directory, points=None):
        """History CSV plus one (x, omega) CSV per snapshot."""
        os.makedirs(directory, exist_ok=True)
        with open(os.path.join(directory, "history.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(HISTORY_FIELDS)
            for row in self.history:
                w.writerow([f"{v:.15e}" for v in row])
        names = []
        for t, om in sorted(self.snapshots.items()):
            if isinstance(om, PeriodicFunction):
                x = om.x if points is None else np.asarray(points, float)
            else:
                x = np.linspace(-10, 10, 801) if points is None else np.asarray(points, float)
            name = f"snapshot_t{t:.6f}.csv"
            np.savetxt(os.path.join(directory, name), np.column_stack([x, om(x)]),
                       delimiter=",", header="x,omega", comments="", fmt="%.15e")
            names.append(name)
        with open(os.path.join(directory, "trajectory.json"), "w") as fh:
            json.dump({"status": self.status, "message": self.message, "snapshots": names,
                       "a": self.config.a, "domain": self.config.domain}, fh, indent=2)


def _record(traj, t, omega, dt):
    sup, xm = sup_and_argmax(omega)
    traj.history.append((t, sup, xm, h3_surrogate(omega), dt, getattr(omega, "map_scale", np.nan)))
    return sup, xm


def _to_halfline(f, N, L):
    """Odd line data -> its restriction to x >= 0 on the mapped Chebyshev grid."""
    if isinstance(f, HalfLineFunction):
        if f.n != 1:
            raise ValueError("line runs need alpha = 1 data (the tilde variable is x itself)")
        if f.size == N and f.map_scale == L:
            return f
    elif isinstance(f, LineFunction):
        if f.parity != "odd":
            raise ValueError("line runs need odd data")
    elif not callable(f):
        raise ValueError("cannot read the initial data")
    return HalfLineFunction.from_function(lambda w: f(w), 1, N, L)


def remap(omega, map_scale):
    """Re-expand a line field on the map with a new scale."""
    if isinstance(omega, HalfLineFunction):
        return HalfLineFunction.from_function(omega, 1, omega.size, map_scale)
    return omega.remap(map_scale)


def prepare(config: SimConfig, omega0):
    """Check omega0 against the configured domain, basis and mode count."""
    if config.domain == "circle":
        if not isinstance(omega0, PeriodicFunction):
            raise ValueError("circle runs need a PeriodicFunction")
        if omega0.mode_count != config.mode_count:
            omega0 = _truncate_periodic(_pad_periodic(omega0, config.mode_count), config.mode_count)
        return omega0
    if config.basis == "chebyshev":
        return _to_halfline(omega0, config.mode_count, config.map_scale)
    if not isinstance(omega0, LineFunction):
        raise ValueError("line runs in the Fourier basis need a LineFunction")
    if omega0.parity != "odd":
        raise ValueError("line runs need odd data (u = -Lambda^{-1} omega is built for odd omega)")
    if omega0.map_scale != config.map_scale:
        omega0 = omega0.remap(config.map_scale)
    if omega0.mode_count != config.mode_count:
        omega0 = omega0.resample(config.mode_count)
    return omega0


def run(config: SimConfig, omega0, report=True):
    """Integrate to t_max or the blow-up threshold; returns (Trajectory, BlowupReport)."""
    from .diagnostics import BlowupReport, blowup_fit

    omega = prepare(config, omega0)
    m = config.padded_count
    f = (lambda w: rhs_toy(w, config.a, m)) if config.model == "toy" else (lambda w: rhs(w, config.a, m))
    traj = Trajectory(config)
    t = 0.0
    sup, xm = _record(traj, t, omega, 0.0)
    threshold = config.threshold_for(sup)
    pending = [s for s in config.snapshot_times if 0 <= s <= config.t_max]
    if pending and pending[0] == 0.0:
        traj.snapshots[0.0] = omega
        pending.pop(0)
    while True:
        if t >= config.t_max - 1e-14:
            traj.status = "completed"
            break
        if sup >= threshold:
            traj.status = "threshold"
            traj.message = f"sup-norm {sup:.4g} reached the threshold {threshold:.4g}"
            break
        if config.dt_controller == "fixed":
            dt = config.dt_initial
        else:
            stretch, cfl = _step_limits(omega, config.a, config.model)
            dt = min(config.safety * min(stretch, cfl), config.dt_initial)
        if dt < STALL_DT:
            traj.status = "stalled"
            traj.message = f"dt = {dt:.3e} fell below {STALL_DT:g} at t = {t:.12g}"
            break
        target = min([config.t_max] + pending)
        hit = t + dt >= target - 1e-14
        if hit:
            dt = target - t
        omega = rk4_step(omega, dt, f)
        t = target if hit else t + dt
        if not np.all(np.isfinite(omega.values)):
            traj.status = "stalled"
            traj.message = f"non-finite field at t = {t:.12g}"
            break
        sup, xm = _record(traj, t, omega, dt)
        if pending and abs(t - pending[0]) <= 1e-12:
            traj.snapshots[pending.pop(0)] = omega
        if (config.remap and config.domain == "line" and 0 < xm < REMAP_FRACTION * omega.map_scale):
            log.info("remap at t=%.6g: map_scale %.4g -> %.4g", t, omega.map_scale, xm)
            omega = remap(omega, xm)
    traj.final = SimState(t, omega, tuple(traj.history))
    if not report:
        return traj, None
    if traj.status == "threshold":
        try:
            return traj, blowup_fit(traj.history)
        except ValueError as exc:
            return traj, BlowupReport.empty(str(exc))
    return traj, BlowupReport.empty(f"run ended with status {traj.status!r}")
