"""Direct simulation of omega_t + a u omega_x = 2 omega u_x on the line and the circle."""

from .config import SimConfig, SimState
from .cusp import CuspTrack, cusp_amplitude, cusp_track, cusp_variable
from .diagnostics import BlowupReport, blowup_fit, collapse_metric
from .dynamics import (Trajectory, h3_surrogate, rhs, rhs_toy, rk4_step, run, sup_and_argmax,
                       velocity)

__all__ = [
    "SimConfig", "SimState", "Trajectory", "BlowupReport", "CuspTrack", "rhs", "rhs_toy",
    "velocity", "rk4_step", "run", "blowup_fit", "collapse_metric", "cusp_track",
    "cusp_variable", "cusp_amplitude", "sup_and_argmax", "h3_surrogate",
]
