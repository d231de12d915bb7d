"""
Balance functionals of the scheme and shape diagnostics of a run.

E1 is the discrete mass. E2 is the discrete energy plus everything the scheme moves
out of it: the time-difference terms, the numerical dissipation gamma h^2 tau |e y_xx|^2
and the cubic cross term of Q2. Both stay constant for the fully implicit scheme, so
their drifts Delta1, Delta2 measure the effect of stopping the iteration after two solves.
"""
import math
import warnings
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from modules.conventions.error_types import BlowUpError, BoundaryWarning, LengthMismatchError
from modules.conventions.variables import DiagnosticsRecord, GridState, Mesh, ModelParams
from modules.discrete_core import cubic_flux, dx_forward, dx_second, inner_sum
from modules.time_stepper import BOUNDARY_BAND, boundary_bands

BLOW_UP_FACTOR = 1e3

ExactSolution = Callable[[float], np.ndarray]


def energy_E1(y: GridState) -> float:
    return float(y.h * np.sum(y.values))


def _energy(values: np.ndarray, h: float, params: ModelParams) -> float:
    y_x = dx_forward(values, h)
    return inner_sum(values, values, h) + params.alpha ** 2 * params.epsilon ** 2 * inner_sum(y_x, y_x, h)


class EnergyAccumulator:
    """
    Adds one summand of E2 per time level, keeping only the previous level.
    """

    def __init__(self, y0: GridState, mesh: Mesh, params: ModelParams):
        self.mesh = mesh
        self.params = params
        self.y_prev = y0.values.copy()
        self.accumulated = 0.0
        self.E1_initial = energy_E1(y0)
        self.E2_initial = _energy(y0.values, mesh.h, params)
        self.E1 = self.E1_initial
        self.E2 = self.E2_initial
        self.Delta1 = 0.0
        self.Delta2 = 0.0

    def add(self, y: GridState):
        h, tau = self.mesh.h, self.mesh.tau
        eps, params = self.params.epsilon, self.params
        values = y.values
        y_t = (values - self.y_prev) / tau
        y_xt = dx_forward(y_t, h)
        y_xx = dx_second(values, h)
        self.accumulated += tau ** 2 * (inner_sum(y_t, y_t, h) + params.alpha ** 2 * eps ** 2 * inner_sum(y_xt, y_xt, h)) \
            + params.gamma * h ** 2 * tau * eps ** 2 * inner_sum(y_xx, y_xx, h) \
            + eps ** 2 * (2 * params.c2 - params.c3) * tau * cubic_flux(values, h)
        self.y_prev = values.copy()
        self.E1 = energy_E1(y)
        self.E2 = _energy(values, h, params) + self.accumulated
        self.Delta1 = max(self.Delta1, abs(self.E1 - self.E1_initial))
        self.Delta2 = max(self.Delta2, abs(self.E2 - self.E2_initial))


def energy_E2(history: Iterable[GridState], mesh: Mesh, params: ModelParams) -> float:
    levels = iter(history)
    accumulator = EnergyAccumulator(next(levels), mesh, params)
    for y in levels:
        accumulator.add(y)
    return accumulator.E2


def error_vs_exact(y: GridState, exact: Sequence[float]) -> float:
    exact = np.asarray(exact, dtype=float)
    if exact.shape != y.values.shape:
        raise LengthMismatchError(f'exact solution has shape {exact.shape}, state {y.values.shape}')
    return float(np.max(np.abs(exact - y.values)))


def boundary_max(y: GridState, band: int = BOUNDARY_BAND) -> float:
    return float(np.max(np.abs(y.values[boundary_bands(y.mesh, band)])))


def find_peaks(y: GridState, count: Optional[int] = None, threshold: float = 1e-3) -> List[Tuple[float, float]]:
    """
    Local extrema of |y| above threshold as (signed value, position), largest first.
    Value and position are refined by the parabola through the three nodes around each extremum.
    """
    values, h = y.values, y.h
    magnitude = np.abs(values)
    inner = np.arange(1, len(values) - 1)
    is_peak = (magnitude[inner] >= magnitude[inner - 1]) & (magnitude[inner] > magnitude[inner + 1]) \
        & (magnitude[inner] > threshold)
    peaks = []
    for i in inner[is_peak]:
        left, here, right = values[i - 1], values[i], values[i + 1]
        curvature = left - 2 * here + right
        offset = 0.5 * (left - right) / curvature if curvature != 0 else 0.0
        peaks.append((here - 0.25 * (left - right) * offset, (i + offset) * h))
    peaks.sort(key=lambda peak: -abs(peak[0]))
    return peaks[:count] if count is not None else peaks


def fit_speed(times: Sequence[float], positions: Sequence[float]) -> float:
    """Slope of the least-squares line through the tracked positions."""
    if len(times) < 2:
        raise ValueError('a speed needs at least two positions')
    return float(np.polyfit(np.asarray(times, dtype=float), np.asarray(positions, dtype=float), 1)[0])


def check_blow_up(y: GridState, amplitudes: Sequence[float], t: float):
    peak = float(np.max(np.abs(y.values)))
    limit = BLOW_UP_FACTOR * max((abs(A) for A in amplitudes), default=0.0)
    if not math.isfinite(peak) or (limit > 0 and peak > limit):
        raise BlowUpError(f'max |y| = {peak:.3e} at t = {t:g} (limit {limit:.3e})')


class RunDiagnostics:
    """Diagnostics records of one run, one per call to record()."""

    def __init__(self, y0: GridState, mesh: Mesh, params: ModelParams, exact: Optional[ExactSolution] = None,
                 band: int = BOUNDARY_BAND):
        self.energies = EnergyAccumulator(y0, mesh, params)
        self.mesh = mesh
        self.params = params
        self.exact = exact
        self.band = band
        self.records: List[DiagnosticsRecord] = []
        self.boundary_peak = 0.0
        self.boundary_warned = False

    def add(self, y: GridState):
        self.energies.add(y)

    def record(self, t: float, y: GridState) -> DiagnosticsRecord:
        Er = error_vs_exact(y, self.exact(t)) if self.exact is not None else None
        edge = boundary_max(y, self.band)
        self.boundary_peak = max(self.boundary_peak, edge)
        if edge >= self.params.epsilon ** 2 and not self.boundary_warned:
            self.boundary_warned = True
            warnings.warn(BoundaryWarning(f'max |y| = {edge:.3e} within {self.band} nodes of the boundary at t = {t:g}'),
                          stacklevel=2)
        peaks = find_peaks(y, count=1)
        peak_value, peak_position = peaks[0] if peaks else (0.0, math.nan)
        record = DiagnosticsRecord(t=t, E1=self.energies.E1, E2=self.energies.E2, Delta1=self.energies.Delta1,
                                   Delta2=self.energies.Delta2, Er=Er, boundary_max=edge, peak_value=peak_value,
                                   peak_position=peak_position)
        self.records.append(record)
        return record
