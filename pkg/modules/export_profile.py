from pathlib import Path
from typing import TYPE_CHECKING, Dict, Optional

import numpy as np
from loguru import logger

from modules.conventions.error_types import ConfigError, ConfigErrors, NoRootError
from modules.conventions.read_write import Write
from modules.conventions.variables import AdmissibilityReport, Mesh, ModelParams, digits
from modules.soliton_profile import c_of_q, default_eta_step, exact_mkdv, find_profile_roots, \
    integrate_profile, sample_F, sample_wave, check_admissible

if TYPE_CHECKING:
    from main import SolitonLab

CURVE_REACH = 1.2
MKDV_ETA_MAX = 40.0


class ProfileExporter:
    """Writes the tabulated profile, a sampled wave at t = 0 and the F(g) curve for plotting."""

    def __init__(self, lab_: 'SolitonLab'):
        self.lab = lab_

    @staticmethod
    def __curve(directory: Path, q: float, r: float, header: Dict[str, str], g_hint: float = 2.0) -> Dict[str, Path]:
        try:
            g0, g1 = find_profile_roots(q, r)
            header.update({'g0': digits % g0, 'g1': digits % g1})
            g_max = CURVE_REACH * g1
        except NoRootError:
            g_max = CURVE_REACH * max(g_hint, 1.0)
        header.update({'q': digits % q, 'r': digits % r, 'C(q)': digits % c_of_q(q, r)})
        g, F = sample_F(q, r, g_max)
        Write.table(directory / 'F_curve.dat', [g, F], ['g', 'F'], header)
        Write.text(directory / 'F_curve.gp', ["set terminal pngcairo size 800,600", "set output 'F_curve.png'",
                                              "set xlabel 'g'", "set ylabel 'F(g)'", "set xzeroaxis",
                                              "plot 'F_curve.dat' using 1:2 with lines notitle"])
        return {'F_curve': directory / 'F_curve.dat'}

    def curve(self, q: float, r: float, directory: Path) -> Dict[str, Path]:
        directory.mkdir(parents=True, exist_ok=True)
        paths = self.__curve(directory, q, r, {})
        logger.debug(f'F curve for q = {q}, r = {r} written to {directory}')
        return paths

    def emit(self, A: float, params: ModelParams, directory: Path, h: float = 0.01, L: float = 10.0,
             x0: Optional[float] = None) -> Dict[str, Path]:
        report: AdmissibilityReport = check_admissible(A, params)
        if not report.admissible:
            raise ConfigError(f'A = {A} ({report.regime}): {report.reason}', ConfigErrors.inadmissible_wave)
        directory.mkdir(parents=True, exist_ok=True)
        mesh = Mesh.from_step(L=L, h=h, T=1.0)
        x0 = L / 2 if x0 is None else x0
        header = {key: digits % value for key, value in params.res().items()}
        header.update({'A': digits % A, 'x0': digits % x0, 'regime': report.regime})
        header.update({f'threshold.{key}': digits % value for key, value in report.thresholds.items()})
        header.update({f'published.{key}': digits % value for key, value in report.published.items()})
        paths = {}

        if params.is_mkdv:
            eta = np.arange(0.0, MKDV_ETA_MAX, 1e-3)
            Write.table(directory / 'profile.dat', [eta, 1.0 / np.cosh(eta)], ['eta', 'omega'], header)
            u = exact_mkdv(A, mesh.x, 0.0, x0, params.epsilon)
        else:
            spec = report.spec.at(x0)
            header.update(spec.header())
            profile = integrate_profile(spec, default_eta_step(spec, h, params.epsilon),
                                        self.lab.numerics.tail_tolerance)
            header['cutoff_eta'] = digits % profile.cutoff_eta
            Write.table(directory / 'profile.dat', [profile.etas, profile.omega_values], ['eta', 'omega'], header)
            u = sample_wave(spec, profile, mesh.x, 0.0, params)
            paths.update(self.__curve(directory, spec.q, spec.r, dict(header), spec.g_star))
        paths['profile'] = directory / 'profile.dat'
        Write.table(directory / 'wave.dat', [mesh.x, u], ['x', 'u'], header)
        paths['wave'] = directory / 'wave.dat'
        Write.text(directory / 'profile.gp', ["set terminal pngcairo size 800,600", "set output 'profile.png'",
                                              "set xlabel 'eta'", "set ylabel 'omega'",
                                              "plot 'profile.dat' using 1:2 with lines notitle"])
        return paths
