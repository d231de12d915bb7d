import math
from dataclasses import dataclass, field, asdict, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from modules.conventions.error_types import ConfigError, ConfigErrors, LengthMismatchError, ProfileDomainError
from modules.conventions.text_lang import Language, Texts

CONSTRAINED_NODES = 3
DEFAULT_EPSILON = 0.1
DEFAULT_ITERATIONS = 2
digits = '%.17g'


class Report:
    def __init__(self, lang: Language):
        self.ok_prefix = 'OK_'
        self.nok_prefix = 'NOK_'
        self.flag_prefix = 'FLAG_'
        self.status = Texts.status[lang]
        self.passed = Texts.passed[lang]
        self.failed = Texts.failed[lang]


class SheetNames:
    def __init__(self, lang: Language):
        self.rows = Texts.rows[lang]
        self.table = Texts.table[lang]


@dataclass(frozen=True)
class ModelParams:
    alpha: float
    gamma: float
    c0: float
    c1: float
    c2: float
    c3: float
    epsilon: float = DEFAULT_EPSILON
    n: int = 3

    @property
    def r(self) -> float:
        if self.c2 + self.c3 <= 0:
            raise ProfileDomainError(f'c2 + c3 = {self.c2 + self.c3} leaves r undefined')
        return self.c3 / (self.c2 + self.c3)

    @property
    def gamma_alpha(self) -> float:
        return self.gamma + self.alpha ** 2 * self.c0

    @property
    def xi(self) -> float:
        r = self.r
        return 3 * r ** 2 * self.alpha ** 2 * self.c1 / (2 + r)

    @property
    def is_mkdv(self) -> bool:
        """True for the mKdV member of the family, whose soliton is known in closed form."""
        return self.alpha == 0 and self.c0 == 0 and self.c2 == 0 and self.c3 == 0 and self.c1 > 0 \
            and self.gamma > 0

    def violations(self) -> List[str]:
        found = []
        if self.alpha < 0 or self.gamma < 0:
            found.append('alpha and gamma must be non-negative')
        if self.alpha + self.gamma <= 0:
            found.append('alpha + gamma must be positive')
        if self.c2 < 0 or self.c3 < 0:
            found.append('c2 and c3 must be non-negative')
        if self.epsilon <= 0:
            found.append('epsilon must be positive')
        if self.n != 3:
            found.append('only the cubic case n = 3 is implemented')
        return found

    def check(self):
        found = self.violations()
        if found:
            raise ConfigError('; '.join(found), ConfigErrors.model_invariant)

    def matches(self, other: 'ModelParams', tol: float = 1e-12) -> bool:
        return all(abs(getattr(self, name) - getattr(other, name)) <= tol
                   for name in ('alpha', 'gamma', 'c0', 'c1', 'c2', 'c3'))

    def res(self) -> Dict[str, float]:
        return asdict(self)


MKDV_EXAMPLE = ModelParams(alpha=0.0, gamma=1.0, c0=0.0, c1=2.0, c2=0.0, c3=0.0)
MGDP_EXAMPLE_2 = ModelParams(alpha=1.0, gamma=2.0, c0=1.0, c1=1.0, c2=2.0, c3=2.0)
MGDP_EXAMPLE_3 = ModelParams(alpha=1.0, gamma=2.0, c0=2.0, c1=1.0, c2=1.0, c3=1.0)

# Published amplitude thresholds for the two worked parameter sets, with the admissible
# positive-amplitude intervals they bound.
PUBLISHED_THRESHOLDS = (
    (MGDP_EXAMPLE_2, {'A0_star': 0.33, 'A0_minus': 1.9, 'A0_plus': 2.55},
     ((0.33, 1.9), (2.55, math.inf))),
    (MGDP_EXAMPLE_3, {'A0_star': 0.20},
     ((0.20, math.inf),)),
)


def published_thresholds(params: ModelParams) -> Tuple[Dict[str, float], Tuple[Tuple[float, float], ...]]:
    for known, thresholds, intervals in PUBLISHED_THRESHOLDS:
        if params.matches(known):
            return thresholds, intervals
    return {}, ()


@dataclass(frozen=True)
class SolitonSpec:
    A: float
    x0: float
    V: float
    beta: float
    q: float
    p: float
    r: float
    g_star: float

    def at(self, x0: float) -> 'SolitonSpec':
        return replace(self, x0=x0)

    def header(self) -> Dict[str, str]:
        return {key: digits % value for key, value in asdict(self).items()}


@dataclass
class ProfileTable:
    eta_step: float
    omega_values: np.ndarray
    decay_rate: float
    cutoff_eta: float

    @property
    def etas(self) -> np.ndarray:
        return self.eta_step * np.arange(len(self.omega_values))

    def omega(self, eta: Union[float, np.ndarray]) -> np.ndarray:
        """Even extension with linear interpolation; zero beyond the cutoff."""
        return np.interp(np.abs(eta), self.etas, self.omega_values, right=0.0)


@dataclass(frozen=True)
class Mesh:
    L: float
    I: int
    T: float
    tau: float

    @classmethod
    def from_step(cls, L: float, h: float, T: float, tau: Optional[float] = None) -> 'Mesh':
        I = int(round(L / h))
        h_ = L / I
        return cls(L=L, I=I, T=T, tau=h_ ** 2 if tau is None else tau)

    @property
    def h(self) -> float:
        return self.L / self.I

    @property
    def x(self) -> np.ndarray:
        return self.h * np.arange(self.I + 1)

    @property
    def steps(self) -> int:
        return int(round(self.T / self.tau))

    def check(self):
        if self.I < 16:
            raise ConfigError(f'I = {self.I} is below 16 nodes')
        if self.L <= 0 or self.T <= 0 or self.tau <= 0:
            raise ConfigError(f'L, T and tau must be positive (L={self.L}, T={self.T}, tau={self.tau})')
        if self.tau > self.T:
            raise ConfigError(f'tau = {self.tau} exceeds T = {self.T}')


@dataclass
class GridState:
    values: np.ndarray
    mesh: Mesh

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.mesh.I + 1,):
            raise LengthMismatchError(f'{self.values.shape} values for a mesh with I = {self.mesh.I}')

    @classmethod
    def zeros(cls, mesh: Mesh) -> 'GridState':
        return cls(np.zeros(mesh.I + 1), mesh)

    @property
    def h(self) -> float:
        return self.mesh.h

    def satisfies_boundary(self) -> bool:
        return not (np.any(self.values[:CONSTRAINED_NODES]) or np.any(self.values[-CONSTRAINED_NODES:]))

    def with_boundary(self) -> 'GridState':
        values = self.values.copy()
        values[:CONSTRAINED_NODES] = 0.0
        values[-CONSTRAINED_NODES:] = 0.0
        return GridState(values, self.mesh)


@dataclass
class PentaSystem:
    """
    Five-diagonal system A x = rhs in band storage: bands[k, i] = A[i, i + k - 2].
    """
    bands: np.ndarray
    rhs: np.ndarray
    offsets = (-2, -1, 0, 1, 2)

    def __post_init__(self):
        self.bands = np.array(self.bands, dtype=float)
        self.rhs = np.array(self.rhs, dtype=float)
        if self.bands.shape != (5, self.rhs.size):
            raise LengthMismatchError(f'bands {self.bands.shape} do not match rhs of size {self.rhs.size}')
        n = self.size
        for k, offset in enumerate(self.offsets):
            rows = np.arange(n)
            self.bands[k, (rows + offset < 0) | (rows + offset >= n)] = 0.0

    @property
    def size(self) -> int:
        return self.rhs.size

    @classmethod
    def from_dense(cls, matrix: np.ndarray, rhs: np.ndarray) -> 'PentaSystem':
        n = len(rhs)
        bands = np.zeros((5, n))
        for k, offset in enumerate(cls.offsets):
            for i in range(max(0, -offset), min(n, n - offset)):
                bands[k, i] = matrix[i, i + offset]
        return cls(bands, rhs)

    def to_dense(self) -> np.ndarray:
        n = self.size
        matrix = np.zeros((n, n))
        for k, offset in enumerate(self.offsets):
            for i in range(max(0, -offset), min(n, n - offset)):
                matrix[i, i + offset] = self.bands[k, i]
        return matrix

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(self.size)
        for k, offset in enumerate(self.offsets):
            shifted = np.zeros(self.size)
            if offset >= 0:
                shifted[:self.size - offset] = x[offset:]
            else:
                shifted[-offset:] = x[:offset]
            out += self.bands[k] * shifted
        return out


@dataclass
class StepWorkspace:
    """Per-step iteration state: y_prev is the previous level, phi_prev the latest iterate."""
    y_prev: GridState
    phi_prev: GridState
    system: Optional[PentaSystem] = None
    s: int = 0
    increments: List[float] = field(default_factory=list)

    def reset(self, y_prev: GridState):
        self.y_prev = y_prev
        self.phi_prev = y_prev
        self.system = None
        self.s = 0
        self.increments = []

    @property
    def contracting(self) -> bool:
        return all(later <= earlier for earlier, later in zip(self.increments, self.increments[1:]))


@dataclass
class GridNorms:
    h: float
    values: np.ndarray
    l2: float
    l2_grad_eps: float
    l2_2nd_eps: float

    def lp(self, p: float) -> float:
        return float((self.h * np.sum(np.abs(self.values[1:-1]) ** p)) ** (1.0 / p))


@dataclass
class StabilityAdvisory:
    q1_eff: float
    q2_eff: float
    q1_max: float
    q2_max: float

    @property
    def flagged(self) -> bool:
        # tau = h^2 lands on q1_max up to rounding
        slack = 1 + 1e-9
        return self.q1_eff > self.q1_max * slack or self.q2_eff > self.q2_max * slack

    def __str__(self):
        return f'tau/(eps h^2) = {self.q1_eff:.4g} (max {self.q1_max:g}), h/eps = {self.q2_eff:.4g} ' \
               f'(max {self.q2_max:g})'


@dataclass
class AdmissibilityReport:
    A: float
    gamma_alpha: float
    xi: float
    regime: str
    admissible: bool
    reason: str = ''
    spec: Optional[SolitonSpec] = None
    thresholds: Dict[str, float] = field(default_factory=dict)
    published: Dict[str, float] = field(default_factory=dict)


@dataclass
class DiagnosticsRecord:
    t: float
    E1: float
    E2: float
    Delta1: float
    Delta2: float
    Er: Optional[float]
    boundary_max: float
    peak_value: float
    peak_position: float

    def res(self) -> Dict[str, float]:
        row = asdict(self)
        if row['Er'] is None:
            row['Er'] = float('nan')
        return row


@dataclass(frozen=True)
class WaveConfig:
    A: float
    x0: float


@dataclass
class OutputConfig:
    directory: Path
    snapshots: Tuple[float, ...] = ()
    cadence: int = 100


@dataclass
class NumericSettings:
    tail_tolerance: float = 1e-12
    stability_q1: float = 10.0
    stability_q2: float = 1.0
    boundary_band: int = 10


@dataclass
class RunConfig:
    preset: str
    model: ModelParams
    mesh: Mesh
    waves: List[WaveConfig]
    output: OutputConfig
    exact: str = 'none'
    max_iters: int = DEFAULT_ITERATIONS

    def with_step(self, h: float, directory: Optional[Path] = None) -> 'RunConfig':
        """Same experiment on another mesh with tau = h^2."""
        mesh = Mesh.from_step(L=self.mesh.L, h=h, T=self.mesh.T)
        output = replace(self.output, directory=directory or self.output.directory, snapshots=())
        return replace(self, mesh=mesh, output=output)

    def check(self):
        self.model.check()
        self.mesh.check()
        if self.max_iters < 1:
            raise ConfigError(f'max_iters = {self.max_iters} must be at least 1')
        if self.exact not in ('mkdv', 'none'):
            raise ConfigError(f'exact = {self.exact} must be mkdv or none')
        if self.exact == 'mkdv' and not self.model.is_mkdv:
            raise ConfigError('the exact mKdV soliton needs the mKdV coefficients')
        for wave in self.waves:
            if not 0 < wave.x0 < self.mesh.L:
                raise ConfigError(f'wave peak x0 = {wave.x0} is outside (0, {self.mesh.L})')

    def header(self) -> Dict[str, str]:
        head = {'preset': self.preset}
        head.update({f'model.{key}': str(value) for key, value in self.model.res().items()})
        head.update({'mesh.L': digits % self.mesh.L, 'mesh.I': str(self.mesh.I), 'mesh.h': digits % self.mesh.h,
                     'mesh.tau': digits % self.mesh.tau, 'mesh.T': digits % self.mesh.T})
        for k, wave in enumerate(self.waves, start=1):
            head[f'wave.{k}.A'] = digits % wave.A
            head[f'wave.{k}.x0'] = digits % wave.x0
        return head


@dataclass
class PeakTrack:
    initial_amplitude: float
    final_value: float
    final_position: float
    speed: Optional[float] = None


@dataclass
class RunSummary:
    preset: str
    status: str
    final_t: float
    steps: int
    h: float
    tau: float
    Delta1: float
    Delta2: float
    Er: Optional[float]
    boundary_max: float
    wall_time: float
    g_star: List[float] = field(default_factory=list)
    velocities: List[float] = field(default_factory=list)
    peaks: List[PeakTrack] = field(default_factory=list)
    advisories: List[str] = field(default_factory=list)
    output_dir: Optional[Path] = None

    def res(self) -> Dict:
        data = asdict(self)
        data['output_dir'] = str(self.output_dir) if self.output_dir else None
        return data


@dataclass
class ConvergenceRow:
    h: float
    tau: float
    Er: Optional[float]
    Delta1: Optional[float]
    Delta2: Optional[float]
    status: str
    message: str = ''

    def res(self) -> Dict:
        row = asdict(self)
        for key in ('Er', 'Delta1', 'Delta2'):
            if row[key] is None:
                row[key] = float('nan')
        return row


@dataclass
class IdentityResult:
    name: str
    max_error: float
    scale: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance * max(self.scale, 1e-300)

    def res(self, report: Report) -> Dict:
        return {'identity': self.name, 'max_error': self.max_error, 'scale': self.scale,
                report.status: report.passed if self.passed else report.failed}
