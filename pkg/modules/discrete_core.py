"""
Difference operators and the nonlinear forms of the scheme on a uniform mesh.

Lower-case functions work on plain node arrays (zero outside 0..I) and are what the
stepper calls; the upper-case forms take and return GridState. Every form is zero at
the three constrained nodes on each side.
"""
import math

import numpy as np

from modules.conventions.error_types import LengthMismatchError, StencilIndexError
from modules.conventions.variables import CONSTRAINED_NODES, DEFAULT_EPSILON, GridNorms, GridState, ModelParams


def shift(values: np.ndarray, k: int) -> np.ndarray:
    """out[i] = values[i + k], zero where i + k leaves the array."""
    out = np.zeros_like(values)
    if k > 0:
        out[:-k] = values[k:]
    elif k < 0:
        out[-k:] = values[:k]
    else:
        out[:] = values
    return out


def dx_forward(values: np.ndarray, h: float) -> np.ndarray:
    return (shift(values, 1) - values) / h


def dx_backward(values: np.ndarray, h: float) -> np.ndarray:
    return (values - shift(values, -1)) / h


def dx_central(values: np.ndarray, h: float) -> np.ndarray:
    return (shift(values, 1) - shift(values, -1)) / (2 * h)


def dx_second(values: np.ndarray, h: float) -> np.ndarray:
    return (shift(values, 1) - 2 * values + shift(values, -1)) / h ** 2


def constrain(values: np.ndarray) -> np.ndarray:
    values[:CONSTRAINED_NODES] = 0.0
    values[-CONSTRAINED_NODES:] = 0.0
    return values


def _stencil(y: GridState, i: int):
    if not 1 <= i <= y.mesh.I - 1:
        raise StencilIndexError(f'i = {i} with I = {y.mesh.I}')
    return y.values[i - 1], y.values[i], y.values[i + 1], y.h


def diff_fwd(y: GridState, i: int) -> float:
    _, here, right, h = _stencil(y, i)
    return (right - here) / h


def diff_bwd(y: GridState, i: int) -> float:
    left, here, _, h = _stencil(y, i)
    return (here - left) / h


def diff_cen(y: GridState, i: int) -> float:
    left, _, right, h = _stencil(y, i)
    return (right - left) / (2 * h)


def diff_2nd(y: GridState, i: int) -> float:
    left, here, right, h = _stencil(y, i)
    return (right - 2 * here + left) / h ** 2


def q1(y: np.ndarray, h: float) -> np.ndarray:
    out = 0.5 * (y ** 2 * dx_central(y, h) + y * dx_central(y ** 2, h) + dx_central(y ** 3, h))
    return constrain(out)


def q2(y: np.ndarray, h: float, c2: float, c3: float) -> np.ndarray:
    y_x, y_xb = dx_forward(y, h), dx_backward(y, h)
    inner = c2 * y_x * y_xb + 0.5 * c3 * (2 * y * dx_second(y, h) + y_x ** 2 - 2 * y_x * y_xb + y_xb ** 2)
    return constrain(dx_central(inner, h))


def r1(u: np.ndarray, v: np.ndarray, h: float) -> np.ndarray:
    out = 0.5 * (u ** 2 * dx_central(v, h) + 2 * u * dx_central(u * v, h) + 3 * dx_central(u ** 2 * v, h)
                 + 2 * u * v * dx_central(u, h) + v * dx_central(u ** 2, h))
    return constrain(out)


def r2(u: np.ndarray, w: np.ndarray, h: float, c2: float, c3: float) -> np.ndarray:
    u_x, u_xb, u_xx = dx_forward(u, h), dx_backward(u, h), dx_second(u, h)
    w_x, w_xb, w_xx = dx_forward(w, h), dx_backward(w, h), dx_second(w, h)
    inner = (c2 - c3) * (u_x * w_xb + u_xb * w_x) + c3 * (u * w_xx + u_x * w_x + u_xb * w_xb + u_xx * w)
    return constrain(dx_central(inner, h))


def _same_mesh(*states: GridState):
    first = states[0].mesh
    for state in states[1:]:
        if state.mesh != first:
            raise LengthMismatchError(f'mesh {state.mesh} differs from {first}')


def Q1(y: GridState) -> GridState:
    return GridState(q1(y.values, y.h), y.mesh)


def Q2(y: GridState, params: ModelParams) -> GridState:
    return GridState(q2(y.values, y.h, params.c2, params.c3), y.mesh)


def R1(u: GridState, v: GridState) -> GridState:
    _same_mesh(u, v)
    return GridState(r1(u.values, v.values, u.h), u.mesh)


def R2(u: GridState, w: GridState, params: ModelParams) -> GridState:
    _same_mesh(u, w)
    return GridState(r2(u.values, w.values, u.h, params.c2, params.c3), u.mesh)


def inner_sum(f: np.ndarray, g: np.ndarray, h: float) -> float:
    """h * sum over i = 1..I-1 of f_i g_i."""
    return float(h * np.dot(f[1:-1], g[1:-1]))


def norms(y: GridState, epsilon: float = DEFAULT_EPSILON) -> GridNorms:
    values, h = y.values, y.h
    y_x = dx_forward(values, h)
    y_xx = dx_second(values, h)
    return GridNorms(h=h, values=values,
                     l2=math.sqrt(inner_sum(values, values, h)),
                     l2_grad_eps=epsilon * math.sqrt(inner_sum(y_x, y_x, h)),
                     l2_2nd_eps=epsilon ** 2 * math.sqrt(inner_sum(y_xx, y_xx, h)))


def cubic_flux(values: np.ndarray, h: float) -> float:
    """h * sum over i = 1..I-1 of y_x y_xb y_c."""
    return float(h * np.sum((dx_forward(values, h) * dx_backward(values, h) * dx_central(values, h))[1:-1]))
