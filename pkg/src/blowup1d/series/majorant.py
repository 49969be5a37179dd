"""The quadratic majorant recursion zbar_n = sum_{j=1}^{n-1} zbar_j zbar_{n-j}."""

from __future__ import annotations

from fractions import Fraction
from math import comb


def catalan(k: int) -> int:
    return comb(2 * k, k) // (k + 1)


def majorant_sequence(zeta1: float, count: int) -> list[float]:
    """zbar_1..zbar_count by direct recursion (exact when zeta1 is a Fraction)."""
    if not zeta1 > 0:
        raise ValueError("zeta1 must be positive")
    z = [0, zeta1 if isinstance(zeta1, Fraction) else float(zeta1)]
    for n in range(2, count + 1):
        z.append(sum(z[j] * z[n - j] for j in range(1, n)))
    return z[1:count + 1]


def majorant_radius(zeta1: float, count: int = 12):
    """(zbar_1..zbar_count, 1 / (4 zeta1)).

    The generating function f = (1 - sqrt(1 - 4 zeta1 x)) / 2 solves f - f^2 = zeta1 x,
    so zbar_n = Catalan(n - 1) zeta1^n and the branch point sits at x = 1/(4 zeta1).
    """
    if not zeta1 > 0:
        raise ValueError("zeta1 must be positive")
    seq = [catalan(n - 1) * float(zeta1) ** n for n in range(1, count + 1)]
    return seq, 1.0 / (4.0 * zeta1)
