"""2 pi-periodic real functions stored by their Fourier modes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class PeriodicFunction:
    """f(x) = sum_k f_k exp(ikx) on x_j = 2 pi j / N; modes are rfft / N."""

    fourier_modes: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.fourier_modes, dtype=complex)
        object.__setattr__(self, "fourier_modes", c)

    @classmethod
    def from_values(cls, values):
        values = np.asarray(values, dtype=float)
        if values.size % 2:
            raise ValueError("grid size must be even")
        return cls(np.fft.rfft(values) / values.size)

    @classmethod
    def from_function(cls, func, n):
        return cls.from_values(func(2 * np.pi * np.arange(n) / n))

    @property
    def mode_count(self) -> int:
        return 2 * (self.fourier_modes.size - 1)

    @property
    def wavenumber_cutoff(self) -> int:
        return self.mode_count // 2

    @property
    def mean(self) -> float:
        return float(self.fourier_modes[0].real)

    @property
    def x(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.mode_count) / self.mode_count

    @property
    def values(self) -> np.ndarray:
        n = self.mode_count
        return np.fft.irfft(self.fourier_modes * n, n)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k = np.arange(self.fourier_modes.size)
        w = np.full(k.size, 2.0)
        w[0] = w[-1] = 1.0
        out = np.real(np.exp(1j * np.outer(x.ravel(), k)) @ (w * self.fourier_modes))
        return out.reshape(x.shape)

    def _multiplier(self, m):
        return PeriodicFunction(self.fourier_modes * m)

    def hilbert(self) -> "PeriodicFunction":
        m = -1j * np.ones(self.fourier_modes.size)
        m[0] = 0.0
        m[-1] = 0.0
        return self._multiplier(m)

    def lambda_inv(self) -> "PeriodicFunction":
        """Multiplier -1/|k| (mean sent to 0), so that d/dx lambda_inv = H."""
        k = np.arange(self.fourier_modes.size, dtype=float)
        m = np.zeros_like(k)
        m[1:] = -1.0 / k[1:]
        m[-1] = 0.0
        return self._multiplier(m)

    def derivative(self, order: int = 1) -> "PeriodicFunction":
        k = np.arange(self.fourier_modes.size)
        m = (1j * k) ** order
        if order % 2:
            m[-1] = 0.0
        return self._multiplier(m)

    def __add__(self, other):
        return PeriodicFunction(self.fourier_modes + other.fourier_modes)

    def __sub__(self, other):
        return PeriodicFunction(self.fourier_modes - other.fourier_modes)

    def __mul__(self, other):
        if isinstance(other, PeriodicFunction):
            return PeriodicFunction.from_values(self.values * other.values)
        return PeriodicFunction(self.fourier_modes * other)

    __rmul__ = __mul__
