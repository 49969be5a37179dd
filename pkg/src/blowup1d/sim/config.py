"""Run configuration and the state carried between steps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..funcspace import HalfLineFunction, LineFunction, PeriodicFunction

DOMAINS = ("line", "circle")
BASES = ("fourier", "chebyshev")
CONTROLLERS = ("fixed", "cfl")

STALL_DT = 1e-12
THRESHOLD_FACTOR = 1e3
REMAP_FRACTION = 0.1


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one run of omega_t + a u omega_x = 2 omega u_x.

    basis "fourier" is the rational (mapped Fourier) basis; "chebyshev" stores
    odd line data through x >= 0 on the mapped Chebyshev grid, whose cubic map
    resolves slowly decaying power tails.

    dt_initial is the fixed step for the "fixed" controller and a cap on the
    step for the "cfl" controller.  blowup_threshold = None means 10^3 times
    the initial sup-norm.
    """

    a: float = 0.0
    domain: str = "line"
    map_scale: float = 1.0
    mode_count: int = 512
    dt_initial: float = 1e-2
    dt_controller: str = "cfl"
    safety: float = 0.25
    t_max: float = 1.0
    blowup_threshold: float | None = None
    dealias_fraction: float = 2.0 / 3.0
    snapshot_times: tuple = ()
    remap: bool = True
    model: str = "full"
    basis: str = "fourier"

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise ValueError(f"domain must be one of {DOMAINS}")
        if self.dt_controller not in CONTROLLERS:
            raise ValueError(f"dt_controller must be one of {CONTROLLERS}")
        if self.basis not in BASES:
            raise ValueError(f"basis must be one of {BASES}")
        if self.basis == "chebyshev" and self.domain != "line":
            raise ValueError("the Chebyshev basis is a line representation")
        if self.model not in ("full", "toy"):
            raise ValueError("model must be 'full' or 'toy'")
        if self.model == "toy" and self.domain != "line":
            raise ValueError("the frozen-coefficient model lives on the line")
        if not self.dt_initial > 0:
            raise ValueError("dt_initial must be positive")
        if not 0 < self.safety <= 1:
            raise ValueError("safety must lie in (0, 1]")
        if not 0 < self.dealias_fraction <= 1:
            raise ValueError("dealias_fraction must lie in (0, 1]")
        if self.mode_count < 8 or self.mode_count % 2:
            raise ValueError("mode_count must be even and at least 8")
        if not self.map_scale > 0:
            raise ValueError("map_scale must be positive")
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        object.__setattr__(self, "snapshot_times",
                           tuple(sorted(float(t) for t in self.snapshot_times)))

    @property
    def padded_count(self) -> int:
        # products on m points are alias-free for modes below m/3 = fraction * m / 2
        m = int(np.ceil(self.mode_count / (2 * self.dealias_fraction) * 2))
        return m + (m % 2)

    def threshold_for(self, sup0: float) -> float:
        thr = THRESHOLD_FACTOR * sup0 if self.blowup_threshold is None else self.blowup_threshold
        if not thr > sup0:
            raise ValueError(f"blow-up threshold {thr:g} must exceed the initial sup-norm {sup0:g}")
        return float(thr)


@dataclass(frozen=True, eq=False)
class SimState:
    t: float
    omega: LineFunction | PeriodicFunction | HalfLineFunction
    history: tuple = field(default=(), repr=False)

    @property
    def map_scale(self):
        return getattr(self.omega, "map_scale", None)
