import time
import warnings
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Dict, List, Optional, Sequence

import numpy as np
from loguru import logger
from tqdm import tqdm

from modules.conventions.error_types import ConfigError, ConfigErrors, StabilityWarning
from modules.conventions.read_write import Write
from modules.conventions.text_lang import Texts
from modules.conventions.variables import GridState, PeakTrack, RunConfig, RunSummary, StepWorkspace, digits
from modules.diagnostics import RunDiagnostics, check_blow_up, find_peaks, fit_speed
from modules.soliton_profile import MkdvSoliton, SolitaryWave, Wave, build_wave, check_admissible
from modules.time_stepper import check_stability, init_state, step

if TYPE_CHECKING:
    from main import SolitonLab


class ExperimentRunner:
    """Runs one configuration from the initial state to T and writes its files."""

    def __init__(self, lab_: 'SolitonLab'):
        self.lab = lab_

    def build_waves(self, config: RunConfig) -> List[Wave]:
        waves = []
        for wave in config.waves:
            report = check_admissible(wave.A, config.model)
            if not report.admissible:
                raise ConfigError(f'A = {wave.A} ({report.regime}): {report.reason}', ConfigErrors.inadmissible_wave)
            waves.append(build_wave(wave.A, wave.x0, config.model, config.mesh.h, self.lab.numerics.tail_tolerance))
        return waves

    @staticmethod
    def exact_solution(config: RunConfig, waves: Sequence[Wave]) -> Optional[Callable[[float], np.ndarray]]:
        if config.exact == 'none':
            return None
        if len(waves) != 1 or not isinstance(waves[0], MkdvSoliton):
            raise ConfigError('the exact mKdV solution needs exactly one mKdV wave')
        x, eps = config.mesh.x, config.model.epsilon
        return lambda t: waves[0].evaluate(x, t, eps)

    @staticmethod
    def snapshot_steps(config: RunConfig) -> Dict[int, float]:
        steps = config.mesh.steps
        return {min(steps, int(round(t / config.mesh.tau))): t for t in config.output.snapshots if 0 <= t <= config.mesh.T}

    @staticmethod
    def match_peaks(amplitudes: Sequence[float], peaks: List[tuple]) -> List[tuple]:
        """Pairs each initial amplitude with the unused final peak of the same sign closest in value."""
        free = list(peaks)
        matched = []
        for A in amplitudes:
            same_sign = [peak for peak in free if np.sign(peak[0]) == np.sign(A)]
            if not same_sign:
                matched.append((np.nan, np.nan))
                continue
            best = min(same_sign, key=lambda peak: abs(peak[0] - A))
            free.remove(best)
            matched.append(best)
        return matched

    def __write_snapshot(self, directory: Path, config: RunConfig, t: float, y: GridState):
        header = config.header()
        header['t'] = digits % t
        Write.table(directory / f'snapshot_t{t:g}.dat', [config.mesh.x, y.values], ['x', 'u'], header)

    def __write_plots(self, directory: Path, config: RunConfig, snapshot_times: Sequence[float], exact: bool):
        lines = ["set datafile commentschars '#'", "set datafile separator ','", "set key autotitle columnhead",
                 "set xlabel 't'", "set terminal pngcairo size 1000,600",
                 "set output 'diagnostics.png'", "set multiplot layout 1,2",
                 "plot 'diagnostics.csv' using 't':'Delta1' with lines, '' using 't':'Delta2' with lines"]
        lines.append("plot 'diagnostics.csv' using 't':'Er' with lines" if exact
                     else "plot 'diagnostics.csv' using 't':'peak_value' with lines")
        lines.append("unset multiplot")
        Write.text(directory / 'diagnostics.gp', lines)
        if snapshot_times:
            plots = ', '.join(f"'snapshot_t{t:g}.dat' using 1:2 with lines title 't = {t:g}'" for t in snapshot_times)
            Write.text(directory / 'snapshots.gp', ["set terminal pngcairo size 1000,600", "set output 'snapshots.png'",
                                                    "set xlabel 'x'", "set ylabel 'u'", f"plot {plots}"])

    @staticmethod
    def __summary_lines(summary: RunSummary) -> List[str]:
        lines = [f'preset = {summary.preset}', f'status = {summary.status}', f't = {digits % summary.final_t}',
                 f'steps = {summary.steps}', f'h = {digits % summary.h}', f'tau = {digits % summary.tau}',
                 f'Delta1 = {digits % summary.Delta1}', f'Delta2 = {digits % summary.Delta2}',
                 f'Er = {digits % summary.Er if summary.Er is not None else ""}',
                 f'boundary_max = {digits % summary.boundary_max}', f'wall_time_s = {summary.wall_time:.3f}']
        lines += [f'wave.{k}.g_star = {digits % g}' for k, g in enumerate(summary.g_star, start=1)]
        lines += [f'wave.{k}.V = {digits % V}' for k, V in enumerate(summary.velocities, start=1)]
        for k, peak in enumerate(summary.peaks, start=1):
            lines += [f'wave.{k}.peak_value = {digits % peak.final_value}',
                      f'wave.{k}.peak_position = {digits % peak.final_position}']
            if peak.speed is not None:
                lines.append(f'wave.{k}.peak_speed = {digits % peak.speed}')
        lines += [f'advisory = {text}' for text in summary.advisories]
        return lines

    def run(self, config: RunConfig, write: bool = True) -> RunSummary:
        config.check()
        mesh, params = config.mesh, config.model
        start = time.perf_counter()
        advisories: Dict[str, str] = {}

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')

            def drain():
                while caught:
                    message = caught.pop(0)
                    name = message.category.__name__
                    if name not in advisories:
                        advisories[name] = f'{name}: {message.message}'
                        logger.warning(advisories[name])

            waves = self.build_waves(config)
            advisory = check_stability(mesh, params, self.lab.numerics.stability_q1, self.lab.numerics.stability_q2)
            if advisory.flagged:
                warnings.warn(StabilityWarning(f'{Texts.stability_advisory[self.lab.lang]}{advisory}'))
            exact = self.exact_solution(config, waves)
            y = init_state(waves, mesh, params, self.lab.numerics.boundary_band)
            drain()

            diagnostics = RunDiagnostics(y, mesh, params, exact, self.lab.numerics.boundary_band)
            amplitudes = [wave.A for wave in config.waves]
            snapshots = self.snapshot_steps(config)
            directory = config.output.directory
            if write:
                directory.mkdir(parents=True, exist_ok=True)
            times: List[float] = []
            positions: List[float] = []
            workspace = StepWorkspace(y_prev=y, phi_prev=y)

            def record(t_: float, y_: GridState):
                diagnostics.record(t_, y_)
                if len(waves) == 1 and diagnostics.records[-1].peak_value != 0.0:
                    times.append(t_)
                    positions.append(diagnostics.records[-1].peak_position)

            record(0.0, y)
            if write and 0 in snapshots:
                self.__write_snapshot(directory, config, snapshots[0], y)

            logger.info(f'{Texts.run_started[self.lab.lang]}{config.preset} (I = {mesh.I}, steps = {mesh.steps})')
            t = 0.0
            try:
                for j in tqdm(range(1, mesh.steps + 1), disable=self.lab.quiet, desc=config.preset, mininterval=1.0):
                    y = step(y, mesh, params, config.max_iters, workspace)
                    t = j * mesh.tau
                    diagnostics.add(y)
                    check_blow_up(y, amplitudes, t)
                    if j % config.output.cadence == 0 or j == mesh.steps:
                        record(t, y)
                    if write and j in snapshots:
                        self.__write_snapshot(directory, config, snapshots[j], y)
                    if caught:
                        drain()
            finally:
                if write and diagnostics.records:
                    Write.csv(directory / 'diagnostics.csv', [row.res() for row in diagnostics.records],
                              config.header())

        final = diagnostics.records[-1]
        final_peaks = self.match_peaks(amplitudes, find_peaks(y, count=2 * len(waves)))
        peaks = [PeakTrack(initial_amplitude=A, final_value=value, final_position=position)
                 for A, (value, position) in zip(amplitudes, final_peaks)]
        if len(waves) == 1 and len(times) >= 2:
            peaks[0].speed = fit_speed(times, positions)

        summary = RunSummary(preset=config.preset, status='FLAG' if advisories else 'OK', final_t=t, steps=mesh.steps,
                             h=mesh.h, tau=mesh.tau, Delta1=final.Delta1, Delta2=final.Delta2, Er=final.Er,
                             boundary_max=diagnostics.boundary_peak, wall_time=time.perf_counter() - start,
                             g_star=[wave.spec.g_star for wave in waves if isinstance(wave, SolitaryWave)],
                             velocities=[wave.velocity for wave in waves], peaks=peaks,
                             advisories=list(advisories.values()), output_dir=directory if write else None)
        if write:
            Write.json(directory / 'summary.json', summary.res())
            Write.text(directory / 'summary.txt', self.__summary_lines(summary))
            self.__write_plots(directory, config, sorted(snapshots.values()), exact is not None)
        return summary
