import numpy as np
import pytest

from main import SolitonLab
from modules.conventions.text_lang import Language
from modules.conventions.variables import GridState, Mesh, NumericSettings


@pytest.fixture
def lab() -> SolitonLab:
    return SolitonLab(lang=Language.en, numerics=NumericSettings(), quiet=True)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def small_mesh() -> Mesh:
    return Mesh.from_step(L=4.0, h=0.1, T=1.0)


def random_grid_state(rng: np.random.Generator, mesh: Mesh, margin: int = 5) -> GridState:
    """Random values away from both ends, zero near the boundary."""
    values = np.zeros(mesh.I + 1)
    values[margin:mesh.I - margin + 1] = rng.uniform(-1.0, 1.0, mesh.I - 2 * margin + 1)
    return GridState(values, mesh)


def random_smooth_state(rng: np.random.Generator, mesh: Mesh, bumps: int = 3) -> GridState:
    """Sum of Gaussian bumps of amplitude below 1 and width 0.2 to 0.5, centred in the middle third."""
    values = np.zeros(mesh.I + 1)
    for _ in range(bumps):
        centre = rng.uniform(mesh.L / 3, 2 * mesh.L / 3)
        width = rng.uniform(0.2, 0.5)
        values += rng.uniform(-1.0, 1.0) * np.exp(-((mesh.x - centre) / width) ** 2)
    return GridState(values, mesh).with_boundary()
