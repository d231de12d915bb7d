"""
One time level of the linearized implicit scheme.

For a frozen iterate phi_bar the new level phi solves the linear system

    phi - a^2 e^2 phi_xx + tau {c0 phi_c + c1 R1(phi_bar, phi) + e^2 (g_h (phi_xx)_c + g h (phi_xx)_x)
                                - e^2 R2(phi_bar, phi)}
        = y - a^2 e^2 y_xx + tau {2 c1 Q1(phi_bar) - e^2 Q2(phi_bar)}

with g_h = gamma (1 - h). Every term reaches at most two nodes, so the matrix is
five-diagonal. A step freezes phi_bar = y, solves, freezes the result and solves again.
"""
import math
import warnings
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from modules.conventions.error_types import DomainTooSmall, DivergenceWarning, OverlapWarning
from modules.conventions.variables import CONSTRAINED_NODES, DEFAULT_ITERATIONS, GridState, Mesh, ModelParams, \
    PentaSystem, StabilityAdvisory, StepWorkspace
from modules.discrete_core import constrain, dx_central, dx_forward, dx_second, inner_sum, q1, q2, r1, r2
from modules.penta_solver import SolveStats, solve_penta
from modules.soliton_profile import Wave

COMB = 5
QUADRATURE_POINTS = 5
OVERLAP_THRESHOLD = 1e-8
BOUNDARY_BAND = 10
INCREMENT_FLOOR = 1e-14


def _apply_linear(phi: np.ndarray, phi_bar: np.ndarray, mesh: Mesh, params: ModelParams) -> np.ndarray:
    h, tau, eps = mesh.h, mesh.tau, params.epsilon
    phi_xx = dx_second(phi, h)
    dispersion = params.gamma * (1 - h) * dx_central(phi_xx, h) + params.gamma * h * dx_forward(phi_xx, h)
    transport = params.c0 * dx_central(phi, h) + params.c1 * r1(phi_bar, phi, h) \
        + eps ** 2 * (dispersion - r2(phi_bar, phi, h, params.c2, params.c3))
    return phi - params.alpha ** 2 * eps ** 2 * phi_xx + tau * transport


def _constrained_rows(n: int) -> np.ndarray:
    return np.r_[0:CONSTRAINED_NODES, n - CONSTRAINED_NODES:n]


def assemble_system(phi_bar: GridState, y_prev: GridState, mesh: Mesh, params: ModelParams) -> PentaSystem:
    """
    Reads the five bands off the linear operator by applying it to five comb vectors:
    column j belongs to comb j mod 5, and no two columns of one comb share a row.
    """
    n = mesh.I + 1
    rows = np.arange(n)
    responses = np.array([_apply_linear((rows % COMB == k).astype(float), phi_bar.values, mesh, params)
                          for k in range(COMB)])
    bands = np.array([responses[(rows + offset) % COMB, rows] for offset in PentaSystem.offsets])

    h, tau, eps = mesh.h, mesh.tau, params.epsilon
    y = y_prev.values
    rhs = y - params.alpha ** 2 * eps ** 2 * dx_second(y, h) \
        + tau * (2 * params.c1 * q1(phi_bar.values, h) - eps ** 2 * q2(phi_bar.values, h, params.c2, params.c3))

    fixed = _constrained_rows(n)
    bands[:, fixed] = 0.0
    bands[2, fixed] = 1.0
    rhs[fixed] = 0.0
    return PentaSystem(bands, rhs)


def step(y_prev: GridState, mesh: Mesh, params: ModelParams, max_iters: int = DEFAULT_ITERATIONS,
         workspace: Optional[StepWorkspace] = None, stats: Optional[SolveStats] = None) -> GridState:
    if workspace is None:
        workspace = StepWorkspace(y_prev=y_prev, phi_prev=y_prev)
    workspace.reset(y_prev)

    for s in range(1, max_iters + 1):
        system = assemble_system(workspace.phi_prev, y_prev, mesh, params)
        values = constrain(solve_penta(system, stats))
        increment = values - workspace.phi_prev.values
        workspace.increments.append(math.sqrt(inner_sum(increment, increment, mesh.h)))
        workspace.system = system
        workspace.phi_prev = GridState(values, mesh)
        workspace.s = s

    floor = INCREMENT_FLOOR * (1 + float(np.max(np.abs(y_prev.values))))
    growing = [(earlier, later) for earlier, later in zip(workspace.increments, workspace.increments[1:])
               if later > earlier and later > floor]
    if growing:
        warnings.warn(DivergenceWarning(f'iterate increments grow: {workspace.increments}'), stacklevel=2)
    return workspace.phi_prev


def cell_average(wave: Wave, mesh: Mesh, epsilon: float) -> np.ndarray:
    """(1/h) times the integral over [x_i - h/2, x_i + h/2] by Gauss-Legendre quadrature."""
    nodes, weights = leggauss(QUADRATURE_POINTS)
    points = mesh.x[:, None] + 0.5 * mesh.h * nodes[None, :]
    return 0.5 * wave.evaluate(points, 0.0, epsilon) @ weights


def boundary_bands(mesh: Mesh, band: int = BOUNDARY_BAND) -> np.ndarray:
    """Node indices within band * h of either end."""
    return np.r_[0:band + 1, mesh.I - band:mesh.I + 1]


def init_state(waves: Sequence[Wave], mesh: Mesh, params: ModelParams, band: int = BOUNDARY_BAND) -> GridState:
    eps = params.epsilon
    edges = mesh.x[boundary_bands(mesh, band)]
    averages = []
    for wave in waves:
        reach = float(np.max(np.abs(wave.evaluate(edges, 0.0, eps))))
        if reach >= eps ** 2:
            raise DomainTooSmall(f'wave A = {wave.amplitude} at x0 = {wave.x0} is {reach:.3e} within {band} nodes '
                                 f'of the boundary (limit {eps ** 2:g})')
        averages.append(cell_average(wave, mesh, eps))

    for a in range(len(waves)):
        for b in range(a + 1, len(waves)):
            overlap = float(np.max(np.abs(averages[a] * averages[b]))) \
                / abs(waves[a].amplitude * waves[b].amplitude)
            if overlap > OVERLAP_THRESHOLD:
                warnings.warn(OverlapWarning(f'waves {a + 1} and {b + 1} overlap at {overlap:.3e}'), stacklevel=2)

    total = np.sum(averages, axis=0) if averages else np.zeros(mesh.I + 1)
    return GridState(constrain(total), mesh)


def check_stability(mesh: Mesh, params: ModelParams, q1_max: float = 10.0, q2_max: float = 1.0) -> StabilityAdvisory:
    eps = params.epsilon
    return StabilityAdvisory(q1_eff=mesh.tau / (eps * mesh.h ** 2), q2_eff=mesh.h / eps, q1_max=q1_max, q2_max=q2_max)
