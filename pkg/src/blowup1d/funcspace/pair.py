"""A real function together with its (tilde) Hilbert transform."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .halfline import HalfLineFunction, hilbert_alpha
from .line import LineFunction


def _transform(f):
    if isinstance(f, LineFunction):
        return f.hilbert()
    if isinstance(f, HalfLineFunction):
        return hilbert_alpha(f.n, f)
    raise TypeError("expected LineFunction or HalfLineFunction")


@dataclass(frozen=True, eq=False)
class ComplexPair:
    """U = real_part + i imag_part with imag_part the transform of real_part."""

    real_part: LineFunction | HalfLineFunction
    imag_part: LineFunction | HalfLineFunction

    def __post_init__(self):
        if type(self.real_part) is not type(self.imag_part):
            raise TypeError("both parts must be of the same kind")
        if isinstance(self.real_part, LineFunction):
            p, q = self.real_part.parity, self.imag_part.parity
            if {p, q} <= {"odd", "even"} and p == q:
                raise ValueError("odd real part needs an even imaginary part")

    @classmethod
    def from_real(cls, f):
        return cls(f, _transform(f))

    def __call__(self, x):
        return self.real_part(x) + 1j * self.imag_part(x)

    def consistency_error(self) -> float:
        """sup |imag_part - transform(real_part)| at the grid nodes."""
        return float(np.max(np.abs(self.imag_part.values - _transform(self.real_part).values)))
