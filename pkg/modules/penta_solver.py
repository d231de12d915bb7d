"""
Banded Gaussian elimination for five-diagonal systems, O(n) work per solve.

No pivoting: the systems of the scheme are the identity plus a skew part plus a
positive semi-definite part, so the pivots stay away from zero. A pivot below
PIVOT_GUARD times its row maximum raises SingularSystemError.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from modules.conventions.error_types import SingularSystemError
from modules.conventions.variables import PentaSystem

PIVOT_GUARD = 1e-14


@dataclass
class SolveStats:
    """Floating point operation counter shared across solves."""
    operations: int = 0
    solves: int = 0


def solve_penta(system: PentaSystem, stats: Optional[SolveStats] = None) -> np.ndarray:
    n = system.size
    sub2, sub1, diag, sup1, sup2 = (list(map(float, band)) for band in system.bands)
    rhs = list(map(float, system.rhs))
    row_max = np.abs(system.bands).max(axis=0).tolist()
    operations = 0

    for i in range(n):
        pivot = diag[i]
        if abs(pivot) <= PIVOT_GUARD * row_max[i]:
            raise SingularSystemError(f'pivot {pivot:.3e} in row {i} of {n} (row max {row_max[i]:.3e})')
        if i + 1 < n and sub1[i + 1] != 0.0:
            factor = sub1[i + 1] / pivot
            diag[i + 1] -= factor * sup1[i]
            sup1[i + 1] -= factor * sup2[i]
            rhs[i + 1] -= factor * rhs[i]
            operations += 7
        if i + 2 < n and sub2[i + 2] != 0.0:
            factor = sub2[i + 2] / pivot
            sub1[i + 2] -= factor * sup1[i]
            diag[i + 2] -= factor * sup2[i]
            rhs[i + 2] -= factor * rhs[i]
            operations += 7

    x = [0.0] * n
    for i in range(n - 1, -1, -1):
        value = rhs[i]
        if i + 1 < n:
            value -= sup1[i] * x[i + 1]
        if i + 2 < n:
            value -= sup2[i] * x[i + 2]
        x[i] = value / diag[i]
        operations += 5

    if stats is not None:
        stats.operations += operations
        stats.solves += 1
    return np.array(x)


def residual(system: PentaSystem, x: np.ndarray) -> float:
    """max |A x - b|"""
    return float(np.max(np.abs(system.matvec(x) - system.rhs)))
