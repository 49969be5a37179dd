"""The transported cusp variable on the circle.

For omega_t + a u omega_x = 2 omega u_x the quantity f = int_0^x omega^(-a/2) dy
obeys f_t + a u f_x = 0, since

    (omega^(-a/2))_t = -a (u omega^(-a/2))_x.

If omega ~ c x^beta near 0 then f ~ A x^gamma with gamma = 1 - a beta / 2, and
A'(t) = a gamma H omega(t, 0) A(t), which is negative for data positive on (0, pi).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_jacobi

from ..funcspace import PeriodicFunction
from .config import SimConfig
from .dynamics import prepare, rhs, rk4_step, _step_limits

MONOTONE_TOL = 1e-6
POSITIVITY_SCAN = 2048
WINDOW = (2, 20)
WINDOW_POINTS = 16
QUAD_NODES = 48


@dataclass
class CuspTrack:
    a: float
    alpha: float
    gamma: float
    times: list = field(default_factory=list)
    f_snapshots: list = field(default_factory=list)
    A_values: list = field(default_factory=list)
    status: str = "running"
    message: str = ""

    @property
    def monotone(self) -> bool:
        A = np.array([v for _, v in self.A_values])
        return bool(np.all(np.diff(A) <= MONOTONE_TOL))

    def to_json(self, path=None):
        d = {"a": self.a, "alpha": self.alpha, "gamma": self.gamma, "status": self.status,
             "message": self.message, "monotone": self.monotone,
             "A": [[float(t), float(v)] for t, v in self.A_values]}
        text = json.dumps(d, indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _window(omega: PeriodicFunction):
    dx = 2 * np.pi / omega.mode_count
    return np.geomspace(WINDOW[0] * dx, WINDOW[1] * dx, WINDOW_POINTS)


def cusp_variable(omega: PeriodicFunction, a: float, alpha: float, x):
    """f(x) = int_0^x omega^(-a/2) dy at each x > 0, by Gauss-Jacobi on the y^(-a alpha/2) factor.

    omega is read as y^alpha m(y) with m = omega / y^alpha smooth and positive.
    """
    p = -a * alpha / 2
    t, wq = roots_jacobi(QUAD_NODES, 0.0, p)
    out = []
    for xi in np.atleast_1d(x):
        y = 0.5 * xi * (t + 1)
        m = omega(y) / y ** alpha
        if np.any(m <= 0):
            raise ValueError("omega vanishes inside the integration range")
        # y^p = (xi/2)^p (1 + t)^p; the Jacobi weight carries (1 + t)^p
        out.append(float((0.5 * xi) ** (p + 1) * np.sum(wq * m ** (-a / 2))))
    return np.array(out)


def cusp_amplitude(x, f, gamma):
    """A from log f = log A + gamma log x + c x^2, least squares over the window."""
    x, f = np.asarray(x, float), np.asarray(f, float)
    M = np.column_stack([np.ones_like(x), x ** 2])
    coef, *_ = np.linalg.lstsq(M, np.log(f) - gamma * np.log(x), rcond=None)
    return float(np.exp(coef[0]))


def _check_positive(omega, alpha):
    x = np.linspace(0, np.pi, POSITIVITY_SCAN + 1)[1:-1]
    v = omega(x)
    if np.any(v <= 0):
        return float(x[np.argmax(v <= 0)])
    return None


def cusp_track(config: SimConfig, omega0: PeriodicFunction, alpha: float = 1.0,
               times=None, steps_per_sample: int = 1) -> CuspTrack:
    """Evolve on the circle and record f and A(t) every `steps_per_sample` steps.

    alpha is the vanishing order of omega0 at x = 0 (omega0 ~ x^alpha).
    """
    a = float(config.a)
    if config.domain != "circle":
        raise ValueError("the cusp tracker runs on the circle")
    if not a < 2:
        raise ValueError("cusp tracking needs a < 2")
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if not a * alpha / 2 < 1:
        raise ValueError("need a alpha / 2 < 1 for omega^(-a/2) to be integrable at 0")
    omega = prepare(config, omega0)
    bad = _check_positive(omega, alpha)
    if bad is not None:
        raise ValueError(f"omega0 must be positive on (0, pi); it vanishes near x = {bad:.4g}")
    gamma = 1 - a * alpha / 2
    track = CuspTrack(a, float(alpha), gamma)
    x = _window(omega)
    m = config.padded_count
    f = lambda w: rhs(w, a, m)

    def sample(t, om):
        fx = cusp_variable(om, a, alpha, x)
        track.times.append(t)
        track.f_snapshots.append(np.column_stack([x, fx]))
        track.A_values.append((t, cusp_amplitude(x, fx, gamma)))

    t, k = 0.0, 0
    sample(t, omega)
    while t < config.t_max - 1e-14:
        if config.dt_controller == "fixed":
            dt = config.dt_initial
        else:
            stretch, cfl = _step_limits(omega, a)
            dt = min(config.safety * min(stretch, cfl), config.dt_initial)
        dt = min(dt, config.t_max - t)
        omega = rk4_step(omega, dt, f)
        t += dt
        k += 1
        bad = _check_positive(omega, alpha)
        if bad is not None:
            track.status = "halted"
            track.message = f"omega developed a zero near x = {bad:.4g} at t = {t:.6g}"
            return track
        if k % steps_per_sample == 0 or t >= config.t_max - 1e-14:
            sample(t, omega)
    track.status = "completed"
    return track
