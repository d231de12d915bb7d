"""
Traveling-wave profiles of the cubic gmKdV equation.

A wave u = A w(beta (x - V t - x0) / eps) is fixed by a root g* of F(g, q). The profile
relaxes from g* to the double root g = 1 along (dg/deta)^2 = F(g, q), and w = (1 - g^r) / p.
Positive amplitudes start below the double root (g0 in (0, 1)), negative ones above it (g1 > 1).
"""
import math
from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np
from numpy.polynomial.polynomial import polyval
from loguru import logger

from modules.conventions.error_types import ConfigError, LabError, NoRootError, NoSolutionError, \
    ProfileDomainError, StagnationError, ViolatedCondition7
from modules.conventions.variables import AdmissibilityReport, ModelParams, ProfileTable, SolitonSpec, \
    published_thresholds

ROOT_EDGE = 1e-12
G_MAX = 1e3
NEWTON_STEPS = 5
SCAN_POINTS = 4000
DOUBLE_ROOT_GAP = 1e-6
NEAR_DOUBLE_ROOT = 1e-2
TAYLOR_ORDER = 6
DEFAULT_ETA_STEP = 1e-3
DEFAULT_TAIL_TOL = 1e-12

Real = Union[float, np.ndarray]


def _check_r(r: float):
    if not 0.0 < r < 1.0:
        raise ProfileDomainError(f'r = {r}')


def c_of_q(q: float, r: float) -> float:
    _check_r(r)
    return r * (3 * r ** 2 - q * (2 + r)) / ((1 - r) * (4 - r ** 2))


def _power_terms(q: float, r: float) -> Tuple[Tuple[float, float], ...]:
    """(coefficient, exponent) pairs of the non-constant part of F."""
    return ((3.0, 2.0),
            (-2.0 / (2 + r), 2 + r),
            (-2.0 * (3 - q) / (2 - r), 2 - r),
            ((1 - q) / (1 - r), 2 - 2 * r))


def _falling(m: float, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= m - j
    return out


def eval_F(g: float, q: float, r: float) -> float:
    _check_r(r)
    if g < 0:
        raise ProfileDomainError(f'g = {g} is negative')
    return math.fsum([c * g ** m for c, m in _power_terms(q, r)] + [-c_of_q(q, r)])


def eval_dF(g: float, q: float, r: float, order: int = 1) -> float:
    """Derivative of F in g of the given order (>= 1)."""
    _check_r(r)
    return math.fsum(c * _falling(m, order) * g ** (m - order) for c, m in _power_terms(q, r))


def _dF_dq(g: float, r: float) -> float:
    return 2 * g ** (2 - r) / (2 - r) - g ** (2 - 2 * r) / (1 - r) + r / ((1 - r) * (2 - r))


def _cubic_factor(z: float, q: float) -> float:
    return ((-12 * z + 21) * z + (20 * q - 6)) * z + 10 * q - 3


def eval_F_poly_half(z: float, q: float) -> float:
    return (z - 1) ** 2 * _cubic_factor(z, q) / 15


@dataclass(frozen=True, eq=False)
class ShiftedF:
    """
    F(1 + delta, q, r) without the cancellation of the direct form near the double root.
    Built once per (q, r): the Taylor coefficients at g = 1 and the power terms are stored as arrays.
    """
    q: float
    r: float
    taylor: np.ndarray
    coefficients: np.ndarray
    exponents: np.ndarray
    constant: float

    @classmethod
    def of(cls, q: float, r: float) -> 'ShiftedF':
        _check_r(r)
        terms = np.array(_power_terms(q, r))
        taylor = np.zeros(TAYLOR_ORDER + 1)
        for k in range(2, TAYLOR_ORDER + 1):
            taylor[k] = eval_dF(1.0, q, r, k) / math.factorial(k)
        return cls(q=q, r=r, taylor=taylor, coefficients=terms[:, 0], exponents=terms[:, 1], constant=c_of_q(q, r))

    def __call__(self, delta: float) -> float:
        if delta < -1.0:
            raise ProfileDomainError(f'g = {1.0 + delta} is negative')
        if self.r == 0.5:
            z = math.sqrt(1.0 + delta)
            z_minus_one = delta / (z + 1.0)
            return z_minus_one * z_minus_one * _cubic_factor(z, self.q) / 15
        if abs(delta) < NEAR_DOUBLE_ROOT:
            return float(polyval(delta, self.taylor))
        return float(self.coefficients @ np.power(1.0 + delta, self.exponents) - self.constant)


def q_root(g: float, r: float) -> float:
    """The q for which g is a root of F(., q); F is affine in q."""
    _check_r(r)
    if r == 0.5:
        z = math.sqrt(g)
        return (z - 1) ** 2 * (12 * z + 3) / (10 * (2 * z + 1))
    return -eval_F(g, 0.0, r) / _dF_dq(g, r)


def _cube_root(x: float) -> float:
    return math.copysign(abs(x) ** (1 / 3), x)


def _solve_depressed_cubic(p: float, q: float) -> Tuple[float, ...]:
    """Real solutions of x^3 + p x + q = 0."""
    if p == 0:
        return (-_cube_root(q),)

    d = p ** 3 / 27 + q ** 2 / 4
    if d > 0:
        s = math.sqrt(d)
        return (_cube_root(-q / 2 + s) + _cube_root(-q / 2 - s),)

    r = 3 * q / p
    if d == 0:
        return r, -r / 2

    cosine = max(-1.0, min(1.0, r / 2 * math.sqrt(-3 / p)))
    s = math.acos(cosine) / 3
    t = 2 * math.sqrt(-p / 3)
    u = 2 * math.pi / 3
    return tuple(t * math.cos(s - u * k) for k in range(3))


def solve_cubic(a: float, b: float, c: float, d: float) -> Tuple[float, ...]:
    """Real solutions of a x^3 + b x^2 + c x + d = 0 by Cardano's formula."""
    b, c, d = b / a, c / a, d / a
    p = c - b ** 2 / 3
    q = d - b * c / 3 + b ** 3 * 2 / 27
    return tuple(t - b / 3 for t in _solve_depressed_cubic(p, q))


def _bisect(func: Callable[[float], float], lo: float, hi: float, max_iter: int = 200) -> float:
    f_lo = func(lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = func(mid)
        if f_mid == 0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _polish(g: float, shifted: ShiftedF) -> float:
    for _ in range(NEWTON_STEPS):
        slope = eval_dF(g, shifted.q, shifted.r, 1)
        if slope == 0:
            break
        step = shifted(g - 1.0) / slope
        if not math.isfinite(step) or abs(step) > 1e-3 * abs(g):
            break
        g -= step
    return g


def find_profile_roots(q: float, r: float) -> Tuple[float, float]:
    _check_r(r)
    if q <= 0 or c_of_q(q, r) <= 0:
        raise NoRootError(f'q = {q}, C(q) = {c_of_q(q, r)} for r = {r}')
    shifted = ShiftedF.of(q, r)

    if r == 0.5:
        roots = solve_cubic(-12.0, 21.0, 20 * q - 6, 10 * q - 3)
        below = [z for z in roots if 0 < z < 1]
        above = [z for z in roots if z > 1]
        if not below or not above:
            raise NoRootError(f'cubic factor roots {roots} for q = {q}')
        g0, g1 = max(below) ** 2, min(above) ** 2
    else:
        func = lambda g: shifted(g - 1.0)
        if not func(ROOT_EDGE) < 0 < func(1 - ROOT_EDGE) or not func(G_MAX) < 0 < func(1 + ROOT_EDGE):
            raise NoRootError(f'no sign change of F for q = {q}, r = {r}')
        g0 = _bisect(func, ROOT_EDGE, 1 - ROOT_EDGE)
        g1 = _bisect(func, 1 + ROOT_EDGE, G_MAX)
    return _polish(g0, shifted), _polish(g1, shifted)


def velocity_of_root(g: float, A: float, params: ModelParams) -> float:
    return (params.c3 * A / (-math.expm1(params.r * math.log(g))) - params.gamma) / params.alpha ** 2


def q_of_velocity(V: float, params: ModelParams) -> float:
    return params.c3 ** 2 * (V - params.c0) / (params.c1 * (params.gamma + params.alpha ** 2 * V) ** 2)


def _valid_root(g: float, A: float, params: ModelParams) -> bool:
    q = q_of_velocity(velocity_of_root(g, A, params), params)
    return q > 0 and (A < 0 or c_of_q(q, params.r) > 0)


def _solve_coupling(A: float, params: ModelParams) -> float:
    """Root in g of q_root(g) - q(V(g)) on the branch selected by the sign of A."""
    r = params.r

    def residual(g: float) -> float:
        try:
            return q_root(g, r) - q_of_velocity(velocity_of_root(g, A, params), params)
        except (ZeroDivisionError, OverflowError, ValueError):
            return math.nan

    if A > 0:
        grid = np.linspace(ROOT_EDGE, 1 - DOUBLE_ROOT_GAP, SCAN_POINTS)
    else:
        grid = 1 + np.geomspace(DOUBLE_ROOT_GAP, G_MAX - 1, SCAN_POINTS)
    values = [residual(float(g)) for g in grid]

    candidates = 0
    for lo, hi, f_lo, f_hi in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if not (math.isfinite(f_lo) and math.isfinite(f_hi)) or (f_lo < 0) == (f_hi < 0):
            continue
        g = _bisect(residual, float(lo), float(hi))
        candidates += 1
        if _valid_root(g, A, params):
            if candidates > 1:
                logger.debug(f'Coupling for A = {A}: skipped {candidates - 1} invalid sign changes')
            return g
    raise NoSolutionError(f'A = {A}: residual q_root(g) - q(V(g)) has no admissible sign change')


def solve_wave(A: float, params: ModelParams, x0: float = 0.0) -> SolitonSpec:
    params.check()
    if params.c3 <= 0:
        raise NoSolutionError(f'c3 = {params.c3} must be positive for the profile family')
    if A == 0:
        raise NoSolutionError('A = 0 is not a wave')
    if params.c1 <= 0:
        raise NoSolutionError(f'c1 = {params.c1} gives no real spatial scale')
    r = params.r

    if params.alpha == 0:
        base = 1 - params.c3 * A / params.gamma
        if base <= 0:
            raise NoSolutionError(f'A = {A} must stay below gamma / c3 = {params.gamma / params.c3}')
        g_star = base ** (1 / r)
        q = q_root(g_star, r)
        V = params.c0 + params.c1 * params.gamma ** 2 * q / params.c3 ** 2
    else:
        g_star = _solve_coupling(A, params)
        V = velocity_of_root(g_star, A, params)
        q = q_of_velocity(V, params)

    scale = params.gamma + params.alpha ** 2 * V
    if scale <= 0:
        raise ViolatedCondition7(f'gamma + alpha^2 V = {scale}')
    if q <= 0 or (A > 0 and c_of_q(q, r) <= 0):
        raise NoSolutionError(f'A = {A}: q = {q} has no profile root on this branch')

    spec = SolitonSpec(A=A, x0=x0, V=V,
                       beta=math.sqrt(params.c1 * scale) / (params.c3 * math.sqrt(r)),
                       q=q, p=params.c3 * A / scale, r=r, g_star=g_star)
    logger.debug(f'Wave A = {A}: g* = {g_star:.10f}, V = {V:.10f}, q = {q:.10f}, beta = {spec.beta:.10f}')
    return spec


def taylor_start(g_star: float, q: float, r: float, h: float) -> float:
    """
    Even Taylor series of the profile at eta = h, started at rest on the root g_star.

    With g'' = F'(g)/2 the odd derivatives vanish at the root and
    g(h) = g* + h^2 F'/4 + h^4 F'F''/96 + h^6 F'(3F'F''' + F''^2)/5760 + O(h^8).
    """
    d1 = eval_dF(g_star, q, r, 1)
    d2 = eval_dF(g_star, q, r, 2)
    d3 = eval_dF(g_star, q, r, 3)
    return g_star + 0.25 * h ** 2 * d1 \
        + 0.25 * h ** 4 / math.factorial(4) * d1 * d2 \
        + 0.125 * h ** 6 / math.factorial(6) * d1 * (3 * d1 * d3 + d2 ** 2)


def integrate_profile(spec: SolitonSpec, eta_step: float = DEFAULT_ETA_STEP,
                      tail_tol: float = DEFAULT_TAIL_TOL) -> ProfileTable:
    """
    Tabulates w(eta) for eta >= 0 by classical RK4 on dg/deta = +-sqrt(F).

    The state is delta = g - 1, so the exponential approach to the double root keeps its
    relative accuracy all the way to the tail tolerance.
    """
    if eta_step <= 0 or not 0 < tail_tol < 1e-3:
        raise ConfigError(f'eta_step = {eta_step}, tail_tol = {tail_tol}')
    q, r, p = spec.q, spec.r, spec.p
    sign = 1.0 if spec.A > 0 else -1.0
    decay_rate = math.sqrt(r * q)
    shifted = ShiftedF.of(q, r)
    max_eta = 10 * eta_step + 4 * (math.log(1 / tail_tol) + 50) / decay_rate

    def slope(delta: float) -> float:
        return sign * math.sqrt(max(shifted(delta), 0.0))

    def omega(delta: float) -> float:
        return -math.expm1(r * math.log1p(delta)) / p

    delta = taylor_start(spec.g_star, q, r, eta_step) - 1.0
    if (delta < 0) != (sign > 0) or slope(delta) == 0:
        raise StagnationError(f'A = {spec.A}: start g = {1 + delta} is not on the branch of g* = {spec.g_star}')
    values = [1.0, omega(delta)]
    eta = eta_step
    while abs(values[-1]) >= tail_tol:
        k1 = slope(delta)
        k2 = slope(delta + 0.5 * eta_step * k1)
        k3 = slope(delta + 0.5 * eta_step * k2)
        k4 = slope(delta + eta_step * k3)
        following = delta + eta_step * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        eta += eta_step
        if following == delta or eta > max_eta:
            raise StagnationError(f'A = {spec.A}: g = {1 + delta} stalls at eta = {eta}')
        if (following < 0) != (delta < 0):
            values.append(0.0)
            break
        delta = following
        values.append(omega(delta))

    table = ProfileTable(eta_step=eta_step, omega_values=np.array(values), decay_rate=decay_rate,
                         cutoff_eta=eta_step * (len(values) - 1))
    logger.debug(f'Profile A = {spec.A}: {len(values)} nodes, cutoff eta = {table.cutoff_eta:.4f}')
    return table


def default_eta_step(spec: SolitonSpec, h: float, epsilon: float) -> float:
    return min(DEFAULT_ETA_STEP, spec.beta * h / epsilon)


def sample_wave(spec: SolitonSpec, profile: ProfileTable, x_nodes: Real, t: float,
                params: ModelParams) -> np.ndarray:
    eta = spec.beta * (np.asarray(x_nodes, dtype=float) - spec.V * t - spec.x0) / params.epsilon
    return spec.A * profile.omega(eta)


def exact_mkdv(A: float, x: Real, t: float, x0: float, eps: float) -> Real:
    with np.errstate(over='ignore'):
        return A / np.cosh(A * (np.asarray(x, dtype=float) - A * A * t - x0) / eps)


def sample_F(q: float, r: float, g_max: float, count: int = 401) -> Tuple[np.ndarray, np.ndarray]:
    g = np.linspace(0.0, g_max, count)
    return g, np.array([eval_F(float(value), q, r) for value in g])


@dataclass(frozen=True)
class SolitaryWave:
    spec: SolitonSpec
    profile: ProfileTable

    @property
    def amplitude(self) -> float:
        return self.spec.A

    @property
    def velocity(self) -> float:
        return self.spec.V

    @property
    def x0(self) -> float:
        return self.spec.x0

    def evaluate(self, x: Real, t: float, epsilon: float) -> np.ndarray:
        eta = self.spec.beta * (np.asarray(x, dtype=float) - self.spec.V * t - self.spec.x0) / epsilon
        return self.spec.A * self.profile.omega(eta)


@dataclass(frozen=True)
class MkdvSoliton:
    A: float
    x0: float

    @property
    def amplitude(self) -> float:
        return self.A

    @property
    def velocity(self) -> float:
        return self.A ** 2

    def evaluate(self, x: Real, t: float, epsilon: float) -> np.ndarray:
        return exact_mkdv(self.A, x, t, self.x0, epsilon)


Wave = Union[SolitaryWave, MkdvSoliton]


def build_wave(A: float, x0: float, params: ModelParams, h: float,
               tail_tol: float = DEFAULT_TAIL_TOL) -> Wave:
    if params.is_mkdv:
        return MkdvSoliton(A=A, x0=x0)
    spec = solve_wave(A, params, x0=x0)
    return SolitaryWave(spec, integrate_profile(spec, default_eta_step(spec, h, params.epsilon), tail_tol))


def check_admissible(A: float, params: ModelParams) -> AdmissibilityReport:
    if params.is_mkdv:
        return AdmissibilityReport(A=A, gamma_alpha=params.gamma, xi=0.0, regime='mkdv', admissible=A != 0,
                                   reason='' if A != 0 else 'A = 0 is not a wave')
    gamma_alpha = params.gamma_alpha
    xi = params.xi
    if params.alpha == 0:
        regime = 'alpha0'
    elif A < 0:
        regime = '14c'
    else:
        discriminant = params.c3 ** 2 - 4 * xi * gamma_alpha
        regime = '14' if math.isclose(discriminant, 0.0, abs_tol=1e-12) else '13' if discriminant > 0 else '14a'
    published, intervals = published_thresholds(params)
    report = AdmissibilityReport(A=A, gamma_alpha=gamma_alpha, xi=xi, regime=regime, admissible=False,
                                 published=published)
    if A == 0:
        report.reason = 'A = 0 is not a wave'
        return report
    try:
        spec = solve_wave(A, params)
    except LabError as exc:
        report.reason = str(exc)
        return report
    report.spec = spec

    p = spec.p
    report.thresholds['A0_star'] = p * gamma_alpha / params.c3
    if xi > 0:
        discriminant = params.c3 ** 2 - 4 * xi * gamma_alpha
        report.thresholds['A0_bar'] = p * params.c3 / (2 * xi)
        if discriminant >= 0:
            report.thresholds['A0_minus'] = p * (params.c3 - math.sqrt(discriminant)) / (2 * xi)
            report.thresholds['A0_plus'] = p * (params.c3 + math.sqrt(discriminant)) / (2 * xi)

    if A > 0 and intervals and not any(lo < A < hi for lo, hi in intervals):
        report.reason = f'A = {A} lies outside the published admissible set {intervals}'
        return report
    report.admissible = True
    return report
