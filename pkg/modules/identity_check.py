import math
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from modules.conventions.read_write import Write
from modules.conventions.variables import GridState, IdentityResult, Mesh, ModelParams, MGDP_EXAMPLE_2
from modules.discrete_core import cubic_flux, dx_backward, dx_central, dx_forward, dx_second, inner_sum, \
    norms, q1, q2, r1, r2

if TYPE_CHECKING:
    from main import SolitonLab

TOLERANCE = 1e-12
SUPPORT_MARGIN = 5

Check = Callable[[np.ndarray, np.ndarray, float, ModelParams], Tuple[float, float]]


def random_state(rng: np.random.Generator, mesh: Mesh) -> np.ndarray:
    """Random values on nodes SUPPORT_MARGIN..I-SUPPORT_MARGIN, zero elsewhere."""
    values = np.zeros(mesh.I + 1)
    values[SUPPORT_MARGIN:mesh.I - SUPPORT_MARGIN + 1] = rng.uniform(-1.0, 1.0, mesh.I - 2 * SUPPORT_MARGIN + 1)
    return values


def _sum_abs(values: np.ndarray, h: float) -> float:
    return float(h * np.sum(np.abs(values[1:-1])))


def _pointwise(left: np.ndarray, right: np.ndarray) -> Tuple[float, float]:
    return float(np.max(np.abs(left - right)[1:-1])), float(max(np.max(np.abs(left)), np.max(np.abs(right))))


def mass_q1(y, g, h, params):
    return abs(h * np.sum(q1(y, h)[1:-1])), _sum_abs(q1(y, h), h)


def energy_q1(y, g, h, params):
    terms = y * q1(y, h)
    return abs(h * np.sum(terms[1:-1])), _sum_abs(terms, h)


def mass_q2(y, g, h, params):
    values = q2(y, h, params.c2, params.c3)
    return abs(h * np.sum(values[1:-1])), _sum_abs(values, h)


def energy_q2(y, g, h, params):
    terms = y * q2(y, h, params.c2, params.c3)
    expected = 0.5 * (params.c3 - 2 * params.c2) * cubic_flux(y, h)
    return abs(inner_sum(y, q2(y, h, params.c2, params.c3), h) - expected), _sum_abs(terms, h) + abs(expected)


def split_q1(y, g, h, params):
    return _pointwise(q1(y + g, h), q1(y, h) + r1(y, g, h) + r1(g, y, h) + q1(g, h))


def split_q2(y, g, h, params):
    c2, c3 = params.c2, params.c3
    return _pointwise(q2(y + g, h, c2, c3), q2(y, h, c2, c3) + r2(y, g, h, c2, c3) + q2(g, h, c2, c3))


def diagonal_r1(y, g, h, params):
    return _pointwise(r1(y, y, h), 3 * q1(y, h))


def diagonal_r2(y, g, h, params):
    return _pointwise(r2(y, y, h, params.c2, params.c3), 2 * q2(y, h, params.c2, params.c3))


def product_rule(y, g, h, params):
    right = dx_central(y, h) * g + y * dx_central(g, h) \
        + 0.5 * h ** 2 * dx_backward(dx_forward(y, h) * dx_forward(g, h), h)
    return _pointwise(dx_central(y * g, h), right)


def summation_by_parts(y, g, h, params):
    y_x = dx_forward(y, h)
    return abs(inner_sum(y, dx_second(y, h), h) + inner_sum(y_x, y_x, h)), \
        _sum_abs(y * dx_second(y, h), h)


def max_norm_bound(y, g, h, params):
    """max |f| <= sqrt(2) |f|^(1/2) |f_x|^(1/2); reports the excess over the bound."""
    y_x = dx_forward(y, h)
    bound = math.sqrt(2) * inner_sum(y, y, h) ** 0.25 * inner_sum(y_x, y_x, h) ** 0.25
    return max(0.0, float(np.max(np.abs(y))) - bound), bound


def fourth_power_bound(y, g, h, params):
    """|f|_4^4 <= max |f|^2 |f|^2"""
    state = norms(GridState(y, Mesh(L=h * (len(y) - 1), I=len(y) - 1, T=1.0, tau=1.0)), params.epsilon)
    bound = float(np.max(np.abs(y))) ** 2 * state.l2 ** 2
    return max(0.0, state.lp(4) ** 4 - bound), bound


IDENTITIES: Dict[str, Check] = {
    'sum Q1 = 0': mass_q1,
    'sum y Q1 = 0': energy_q1,
    'sum Q2 = 0': mass_q2,
    'sum y Q2 = (c3 - 2 c2)/2 sum y_x y_xb y_c': energy_q2,
    'Q1(a + b) = Q1(a) + R1(a, b) + R1(b, a) + Q1(b)': split_q1,
    'Q2(a + b) = Q2(a) + R2(a, b) + Q2(b)': split_q2,
    'R1(u, u) = 3 Q1(u)': diagonal_r1,
    'R2(u, u) = 2 Q2(u)': diagonal_r2,
    'product rule (yg)_c': product_rule,
    'summation by parts': summation_by_parts,
    'max-norm bound': max_norm_bound,
    'fourth-power bound': fourth_power_bound,
}


class IdentityCheck:
    """Evaluates the exact summation identities and inequalities on random zero-boundary states."""

    def __init__(self, lab_: 'SolitonLab'):
        self.lab = lab_

    def run(self, params: ModelParams = MGDP_EXAMPLE_2, I: int = 256, samples: int = 100, seed: int = 0,
            directory: Optional[Path] = None) -> List[IdentityResult]:
        mesh = Mesh.from_step(L=10.0, h=10.0 / I, T=1.0)
        rng = np.random.default_rng(seed)
        worst = {name: (0.0, 0.0) for name in IDENTITIES}
        for _ in range(samples):
            y, g = random_state(rng, mesh), random_state(rng, mesh)
            for name, check in IDENTITIES.items():
                error, scale = check(y, g, mesh.h, params)
                if error / max(scale, 1e-300) >= worst[name][0] / max(worst[name][1], 1e-300):
                    worst[name] = (error, scale)

        results = [IdentityResult(name=name, max_error=error, scale=scale, tolerance=TOLERANCE)
                   for name, (error, scale) in worst.items()]
        for result in results:
            logger.debug(f'{result.name}: {result.max_error:.3e} (scale {result.scale:.3e})')
        if directory is not None:
            directory.mkdir(parents=True, exist_ok=True)
            Write.csv(directory / 'identity_check.csv', [result.res(self.lab.report) for result in results],
                      {'I': str(I), 'samples': str(samples), 'seed': str(seed)})
        return results
