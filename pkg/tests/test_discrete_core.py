import numpy as np
import pytest

from modules.conventions.error_types import LengthMismatchError, StencilIndexError
from modules.conventions.variables import GridState, MGDP_EXAMPLE_2, MGDP_EXAMPLE_3, Mesh
from modules.discrete_core import Q1, Q2, R1, R2, cubic_flux, diff_2nd, diff_bwd, diff_cen, diff_fwd, \
    dx_backward, dx_central, dx_forward, inner_sum, norms, shift
from tests.conftest import random_grid_state


def test_shift_pads_with_zeros():
    values = np.array([1.0, 2.0, 3.0, 4.0])
    assert shift(values, 1).tolist() == [2.0, 3.0, 4.0, 0.0]
    assert shift(values, -2).tolist() == [0.0, 0.0, 1.0, 2.0]
    assert shift(values, 0).tolist() == values.tolist()


class TestStencils:
    def test_linear_ramp(self, small_mesh):
        y = GridState(0.7 * small_mesh.x, small_mesh)
        for i in (1, 10, small_mesh.I - 1):
            assert diff_cen(y, i) == pytest.approx(0.7, rel=1e-13)
            assert diff_fwd(y, i) == pytest.approx(0.7, rel=1e-13)

    def test_quadratic(self, small_mesh):
        y = GridState(small_mesh.x ** 2, small_mesh)
        for i in (1, 17, small_mesh.I - 1):
            assert diff_2nd(y, i) == pytest.approx(2.0, rel=1e-10)

    def test_central_is_mean_of_one_sided(self, small_mesh, rng):
        y = GridState(rng.normal(size=small_mesh.I + 1), small_mesh)
        for i in range(1, small_mesh.I):
            assert diff_cen(y, i) == pytest.approx(0.5 * (diff_fwd(y, i) + diff_bwd(y, i)), rel=1e-14, abs=1e-14)

    @pytest.mark.parametrize('i', [0, -1, 40, 41])
    def test_index_outside(self, small_mesh, i):
        with pytest.raises(StencilIndexError):
            diff_cen(GridState.zeros(small_mesh), i)


class TestNonlinearForms:
    def test_constant_interior(self, small_mesh):
        values = np.zeros(small_mesh.I + 1)
        values[3:-3] = 0.8
        y = GridState(values, small_mesh)
        assert np.allclose(Q1(y).values[6:-6], 0.0, atol=1e-12)
        assert np.allclose(Q2(y, MGDP_EXAMPLE_2).values[6:-6], 0.0, atol=1e-12)

    def test_zero_on_constrained_nodes(self, small_mesh, rng):
        y = GridState(rng.normal(size=small_mesh.I + 1), small_mesh)
        for form in (Q1(y), Q2(y, MGDP_EXAMPLE_3), R1(y, y), R2(y, y, MGDP_EXAMPLE_3)):
            assert form.satisfies_boundary()

    def test_sum_identities(self, small_mesh, rng):
        h = small_mesh.h
        for _ in range(20):
            y = random_grid_state(rng, small_mesh)
            size = np.sqrt(inner_sum(y.values, y.values, h))
            assert abs(h * np.sum(Q1(y).values)) <= 1e-12 * max(size ** 3 / h, 1.0)
            assert abs(inner_sum(y.values, Q1(y).values, h)) <= 1e-12 * max(size ** 4 / h, 1.0)
            assert abs(h * np.sum(Q2(y, MGDP_EXAMPLE_2).values)) <= 1e-12 * max(size ** 2 / h ** 3, 1.0)

    @pytest.mark.parametrize('params', [MGDP_EXAMPLE_2, MGDP_EXAMPLE_3])
    def test_energy_of_q2(self, small_mesh, rng, params):
        h = small_mesh.h
        y = random_grid_state(rng, small_mesh)
        expected = 0.5 * (params.c3 - 2 * params.c2) * cubic_flux(y.values, h)
        assert inner_sum(y.values, Q2(y, params).values, h) == pytest.approx(expected, rel=1e-11, abs=1e-11)

    def test_splitting(self, small_mesh, rng):
        a, b = random_grid_state(rng, small_mesh), random_grid_state(rng, small_mesh)
        total = GridState(a.values + b.values, small_mesh)
        left = Q1(total).values
        right = Q1(a).values + R1(a, b).values + R1(b, a).values + Q1(b).values
        assert np.allclose(left, right, rtol=0, atol=1e-12 * np.max(np.abs(left)))
        params = MGDP_EXAMPLE_2
        left = Q2(total, params).values
        right = Q2(a, params).values + R2(a, b, params).values + Q2(b, params).values
        assert np.allclose(left, right, rtol=0, atol=1e-12 * np.max(np.abs(left)))

    def test_diagonal(self, small_mesh, rng):
        u = random_grid_state(rng, small_mesh)
        assert np.allclose(R1(u, u).values, 3 * Q1(u).values, rtol=1e-13, atol=1e-12)
        assert np.allclose(R2(u, u, MGDP_EXAMPLE_3).values, 2 * Q2(u, MGDP_EXAMPLE_3).values, rtol=1e-13,
                           atol=1e-9)

    def test_mesh_mismatch(self, small_mesh):
        other = Mesh.from_step(L=4.0, h=0.1, T=2.0)
        with pytest.raises(LengthMismatchError):
            R1(GridState.zeros(small_mesh), GridState.zeros(other))


class TestNorms:
    def test_zero(self, small_mesh):
        result = norms(GridState.zeros(small_mesh))
        assert result.l2 == result.l2_grad_eps == result.l2_2nd_eps == 0.0
        assert result.lp(4) == 0.0

    def test_single_spike(self, small_mesh):
        values = np.zeros(small_mesh.I + 1)
        values[12] = 1.0
        assert norms(GridState(values, small_mesh)).l2 ** 2 == pytest.approx(small_mesh.h)

    def test_lp2_is_l2(self, small_mesh, rng):
        result = norms(random_grid_state(rng, small_mesh))
        assert result.lp(2) == pytest.approx(result.l2, rel=1e-14)

    def test_central_difference_of_product(self, small_mesh, rng):
        y, g = random_grid_state(rng, small_mesh).values, random_grid_state(rng, small_mesh).values
        h = small_mesh.h
        left = dx_central(y * g, h)
        right = dx_central(y, h) * g + y * dx_central(g, h) \
            + 0.5 * h ** 2 * dx_backward(dx_forward(y, h) * dx_forward(g, h), h)
        assert np.allclose(left[1:-1], right[1:-1], atol=1e-12)
