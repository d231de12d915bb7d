import math
import warnings

import numpy as np
import pytest

from modules.conventions.error_types import BlowUpError, BoundaryWarning, LengthMismatchError
from modules.conventions.variables import GridState, MGDP_EXAMPLE_2, MKDV_EXAMPLE, Mesh
from modules.diagnostics import EnergyAccumulator, RunDiagnostics, boundary_max, check_blow_up, energy_E1, \
    energy_E2, error_vs_exact, find_peaks, fit_speed
from modules.discrete_core import dx_forward, inner_sum
from modules.soliton_profile import MkdvSoliton, exact_mkdv
from modules.time_stepper import init_state, step


@pytest.fixture
def mesh() -> Mesh:
    return Mesh.from_step(L=6.0, h=0.02, T=1.0)


def soliton(mesh: Mesh, A: float = 1.2, x0: float = 3.0) -> GridState:
    return GridState(exact_mkdv(A, mesh.x, 0.0, x0, 0.1), mesh).with_boundary()


class TestBalances:
    def test_zero_state(self, mesh):
        zero = GridState.zeros(mesh)
        assert energy_E1(zero) == 0.0
        assert energy_E2([zero], mesh, MGDP_EXAMPLE_2) == 0.0

    def test_antisymmetric_mass(self, mesh):
        values = np.sin(2 * np.pi * mesh.x / mesh.L)
        assert abs(energy_E1(GridState(values, mesh))) < 1e-14 * np.sqrt(mesh.I)

    def test_single_level_energy(self, mesh):
        y = soliton(mesh)
        y_x = dx_forward(y.values, mesh.h)
        params = MGDP_EXAMPLE_2
        expected = inner_sum(y.values, y.values, mesh.h) + params.epsilon ** 2 * inner_sum(y_x, y_x, mesh.h)
        assert energy_E2([y], mesh, params) == pytest.approx(expected, rel=1e-14)

    def test_unchanged_state_keeps_mass(self, mesh):
        y = soliton(mesh)
        accumulator = EnergyAccumulator(y, mesh, MKDV_EXAMPLE)
        for _ in range(3):
            accumulator.add(y)
        assert accumulator.Delta1 == 0.0
        assert accumulator.E1 == accumulator.E1_initial

    def test_balances_drift_slowly(self):
        mesh = Mesh.from_step(L=6.0, h=0.02, T=1.0)
        y = init_state([MkdvSoliton(A=1.2, x0=3.0)], mesh, MKDV_EXAMPLE)
        accumulator = EnergyAccumulator(y, mesh, MKDV_EXAMPLE)
        for _ in range(10):
            y = step(y, mesh, MKDV_EXAMPLE)
            accumulator.add(y)
        assert accumulator.Delta1 < 1e-3 * abs(accumulator.E1_initial)
        assert accumulator.Delta2 < 1e-3 * accumulator.E2_initial


class TestErrors:
    def test_exact_match(self, mesh):
        y = soliton(mesh)
        assert error_vs_exact(y, y.values.copy()) == 0.0

    def test_shape(self, mesh):
        with pytest.raises(LengthMismatchError):
            error_vs_exact(GridState.zeros(mesh), np.zeros(5))

    def test_boundary_max(self, mesh):
        values = np.zeros(mesh.I + 1)
        values[mesh.I - 4] = -0.3
        values[100] = 2.0
        assert boundary_max(GridState(values, mesh)) == 0.3

    def test_blow_up(self, mesh):
        y = soliton(mesh)
        check_blow_up(y, [1.2], 0.5)
        with pytest.raises(BlowUpError):
            check_blow_up(GridState(2000 * y.values, mesh), [1.2], 0.5)
        values = y.values.copy()
        values[50] = math.nan
        with pytest.raises(BlowUpError):
            check_blow_up(GridState(values, mesh), [1.2], 0.5)


class TestPeaks:
    def test_refined_position(self):
        mesh = Mesh.from_step(L=6.0, h=0.01, T=1.0)
        y = GridState(exact_mkdv(1.2, mesh.x, 0.0, 3.0037, 0.1), mesh)
        (value, position), = find_peaks(y, count=1)
        assert position == pytest.approx(3.0037, abs=1e-3)
        assert value == pytest.approx(1.2, abs=1e-3)

    def test_signed_and_ordered(self, mesh):
        y = GridState(exact_mkdv(0.5, mesh.x, 0.0, 1.5, 0.1) - exact_mkdv(1.0, mesh.x, 0.0, 4.0, 0.1), mesh)
        peaks = find_peaks(y)
        assert len(peaks) == 2
        assert peaks[0][0] == pytest.approx(-1.0, abs=1e-2)
        assert peaks[1][0] == pytest.approx(0.5, abs=1e-2)

    def test_flat_field(self, mesh):
        assert find_peaks(GridState.zeros(mesh)) == []

    def test_speed(self):
        times = [0.0, 0.5, 1.0, 1.5]
        assert fit_speed(times, [3.0 + 1.44 * t for t in times]) == pytest.approx(1.44)
        with pytest.raises(ValueError):
            fit_speed([0.0], [3.0])


class TestRunDiagnostics:
    def test_records(self, mesh):
        y = soliton(mesh)
        diagnostics = RunDiagnostics(y, mesh, MKDV_EXAMPLE, exact=lambda t: exact_mkdv(1.2, mesh.x, t, 3.0, 0.1))
        record = diagnostics.record(0.0, y)
        assert record.t == 0.0 and record.Delta1 == 0.0
        assert record.Er < 1e-12
        assert record.peak_position == pytest.approx(3.0, abs=1e-3)
        assert not math.isnan(record.res()['Er'])

    def test_without_exact(self, mesh):
        diagnostics = RunDiagnostics(GridState.zeros(mesh), mesh, MKDV_EXAMPLE)
        record = diagnostics.record(0.0, GridState.zeros(mesh))
        assert record.Er is None and math.isnan(record.res()['Er'])
        assert math.isnan(record.peak_position)

    def test_boundary_warning_once(self, mesh):
        values = np.zeros(mesh.I + 1)
        values[5] = 0.5
        y = GridState(values, mesh)
        diagnostics = RunDiagnostics(y, mesh, MKDV_EXAMPLE)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            diagnostics.record(0.0, y)
            diagnostics.record(1.0, y)
        assert [message.category for message in caught] == [BoundaryWarning]
        assert diagnostics.boundary_peak == 0.5
