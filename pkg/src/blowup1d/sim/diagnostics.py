"""Blow-up rate fits and self-similar collapse distances."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import curve_fit

log = logging.getLogger(__name__)

MIN_POINTS = 20
MIN_GROWTH = 10.0
FIT_DECADES = 1.5
CLAIM_RESIDUAL = 1e-2
COLLAPSE_WINDOW = 10.0
COLLAPSE_POINTS = 401
# a snapshot is too coarse if a node gap inside |z| <= COARSE_REACH exceeds COARSE_DZ
COARSE_DZ = 0.25
COARSE_REACH = 2.0


@dataclass
class BlowupReport:
    t_star_fit: float = np.nan
    rate_exponent: float = np.nan
    residual: float = np.nan
    fit_window: tuple = (np.nan, np.nan)
    claimed: bool = False
    collapse_distance: list = field(default_factory=list)
    message: str = ""

    @classmethod
    def empty(cls, message):
        return cls(message=message)

    def to_json(self, path=None):
        d = asdict(self)
        d["fit_window"] = list(d["fit_window"])
        d["collapse_distance"] = [list(map(float, p)) for p in self.collapse_distance]
        d = {k: (None if isinstance(v, float) and not np.isfinite(v) else v) for k, v in d.items()}
        text = json.dumps(d, indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _model(t, c, e, ts):
    return c + e * np.log(np.maximum(ts - t, 1e-300))


def blowup_fit(history) -> BlowupReport:
    """Least-squares fit of log sup = c + e log(t* - t) on the late part of the history.

    history holds rows whose first two entries are (t, sup-norm).  The window is
    the last FIT_DECADES decades of growth, or the last MIN_POINTS rows if that
    is longer.
    """
    h = np.asarray([row[:2] for row in history], float)
    if h.shape[0] < MIN_POINTS:
        raise ValueError(f"no blow-up signal: {h.shape[0]} history points, need {MIN_POINTS}")
    t, s = h[:, 0], h[:, 1]
    if not s[-1] >= MIN_GROWTH * s[0]:
        raise ValueError(f"no blow-up signal: sup-norm grew by {s[-1] / s[0]:.3g}, need {MIN_GROWTH:g}")
    late = np.flatnonzero(s >= s[-1] / 10 ** FIT_DECADES)
    start = min(late[0], h.shape[0] - MIN_POINTS)
    tt, ls = t[start:], np.log(s[start:])
    # initial guess from the last two points under the 1/(t* - t) law
    r = s[-2] / s[-1]
    ts0 = (tt[-1] - r * tt[-2]) / (1 - r) if r < 1 else tt[-1] * 1.01
    ts0 = max(ts0, tt[-1] + 1e-12)
    c0 = ls[-1] + np.log(ts0 - tt[-1])
    try:
        p, _ = curve_fit(_model, tt, ls, p0=(c0, -1.0, ts0),
                         bounds=([-np.inf, -10.0, tt[-1] + 1e-14], [np.inf, 0.0, np.inf]),
                         x_scale="jac", ftol=1e-15, xtol=1e-15, gtol=1e-15, max_nfev=10_000)
    except RuntimeError as exc:
        raise ValueError(f"blow-up fit failed: {exc}") from exc
    res = float(np.sqrt(np.mean((_model(tt, *p) - ls) ** 2)))
    return BlowupReport(float(p[2]), float(p[1]), res, (float(tt[0]), float(tt[-1])),
                        res < CLAIM_RESIDUAL, [],
                        "" if res < CLAIM_RESIDUAL else "fit residual too large to claim a rate")


def _profile_values(profile, z):
    F = profile.F
    if hasattr(F, "to_line"):
        return F.to_line(z)
    return F(z)


def _largest_gap(om, reach):
    nodes = om.w if hasattr(om, "w") else np.abs(om.x[np.isfinite(om.x)])
    nodes = np.unique(np.concatenate([[0.0], nodes]))
    k = np.searchsorted(nodes, reach, side="right")
    return float(np.max(np.diff(nodes[:k + 1])))


def collapse_metric(trajectory, profile, lam=None, window=COLLAPSE_WINDOW, points=COLLAPSE_POINTS,
                    return_flags=False):
    """Sup over |z| <= window of |(1 - t) omega(t, z s(t)) - F(z)|, s = (1 - t)^((1 + lambda) / alpha).

    The snapshots of the trajectory are used.  Snapshots with a node gap above
    COARSE_DZ (in z) inside |z| <= COARSE_REACH are dropped (with return_flags the full
    list comes back with a flag per entry).
    """
    lam = profile.lam if lam is None else float(lam)
    alpha = float(Fraction(profile.alpha))
    z = np.linspace(0.0, window, points)
    ref = _profile_values(profile, z)
    out, flags = [], []
    for t, om in sorted(trajectory.snapshots.items()):
        if t >= 1:
            raise ValueError("snapshots must lie before the blow-up time t = 1")
        s = (1 - t) ** ((1 + lam) / alpha)
        dz = _largest_gap(om, COARSE_REACH * s) / s
        v = (1 - t) * om(z * s)
        d = float(np.max(np.abs(v - ref)))
        ok = dz <= COARSE_DZ
        if not ok:
            log.warning("snapshot at t=%.4g too coarse near the origin (dz = %.3g)", t, dz)
        flags.append(ok)
        out.append((float(t), d))
    if return_flags:
        return out, flags
    return [p for p, ok in zip(out, flags) if ok]
