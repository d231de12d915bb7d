import argparse
import sys
import warnings
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from loguru import logger

from modules.conventions.error_handling import expected_error, unexpected_error
from modules.conventions.error_types import ConfigErrors, ConfigError, LabError, error_messages
from modules.conventions.file_system import FileSystem
from modules.conventions.text_lang import Language, Texts
from modules.conventions.timed_func import timed_func
from modules.conventions.variables import ConvergenceRow, IdentityResult, NumericSettings, Report, RunConfig, \
    RunSummary, SheetNames, WaveConfig
from modules.create_config import create_config, get_language, get_numerics, load_run_config, parse_snapshots, \
    parse_wave
from modules.export_profile import ProfileExporter
from modules.identity_check import IdentityCheck
from modules.run_convergence import ConvergenceSweep
from modules.run_experiment import ExperimentRunner

EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

# Define custom log levels
for name_, no_, color_ in (("RED", 38, "<red>"), ("YELLOW", 39, "<yellow>"), ("WHITE", 40, "<white>"),
                           ("GREEN", 41, "<green>")):
    try:
        logger.level(name_)
    except ValueError:
        logger.level(name_, no=no_, color=color_)


def _show_warning(message, category, filename, lineno, file=None, line=None):
    logger.warning(f'{category.__name__}: {message}')


class SolitonLab:
    def __init__(self, lang: Optional[Language] = None, numerics: Optional[NumericSettings] = None,
                 quiet: bool = False):
        if lang is None or numerics is None:
            if not FileSystem.config.exists():
                create_config()
            lang = lang or get_language()
            numerics = numerics or get_numerics()
        logger.debug(Texts.init_lab[lang])
        self.lang = lang
        self.numerics = numerics
        self.quiet = quiet
        self.error_messages = error_messages(lang)
        self.report = Report(lang)
        self.sheet_names = SheetNames(lang)
        self.runner = ExperimentRunner(self)
        self.sweep = ConvergenceSweep(self)
        self.exporter = ProfileExporter(self)
        self.identities = IdentityCheck(self)

    @staticmethod
    def load(config: Optional[Path] = None, preset: Optional[str] = None, overrides: Optional[Dict[str, str]] = None,
             output: Optional[Path] = None) -> RunConfig:
        return load_run_config(config, preset, overrides, output)

    @timed_func()
    def run(self, config: RunConfig) -> RunSummary:
        summary = self.runner.run(config)
        if summary.status == 'OK':
            logger.log("GREEN", f"{self.report.ok_prefix}{Texts.run_ok[self.lang]}{summary.output_dir.resolve()}")
        else:
            logger.log("YELLOW", f"{self.report.flag_prefix}{Texts.run_flag[self.lang]}{summary.output_dir.resolve()}")
        return summary

    @timed_func()
    def convergence(self, config: RunConfig, h_list: Sequence[float], workers: int = 1) -> List[ConvergenceRow]:
        rows = self.sweep.run(config, h_list, workers)
        path = config.output.directory.resolve()
        if all(row.status != 'failed' for row in rows):
            logger.log("GREEN", f"{self.report.ok_prefix}{Texts.convergence_ok[self.lang]}{path}")
        else:
            logger.log("YELLOW", f"{self.report.flag_prefix}{Texts.convergence_flag[self.lang]}{path}")
        return rows

    def profile(self, config: RunConfig, q: Optional[float] = None, A: Optional[float] = None) -> Dict[str, Path]:
        directory = config.output.directory
        if q is not None:
            paths = self.exporter.curve(q, config.model.r, directory)
        else:
            if A is None:
                if not config.waves:
                    raise ConfigError('profile needs --A, --wave or a configured wave', ConfigErrors.missing_key)
                A = config.waves[0].A
            x0 = next((wave.x0 for wave in config.waves if wave.A == A), None)
            paths = self.exporter.emit(A, config.model, directory, config.mesh.h, config.mesh.L, x0)
        logger.log("GREEN", f"{self.report.ok_prefix}{Texts.profile_ok[self.lang]}{directory.resolve()}")
        return paths

    def check(self, config: Optional[RunConfig] = None, I: int = 256, samples: int = 100) -> List[IdentityResult]:
        kwargs = {'directory': config.output.directory} if config else {}
        if config and not config.model.is_mkdv:
            kwargs['params'] = config.model
        results = self.identities.run(I=I, samples=samples, **kwargs)
        failed = [result.name for result in results if not result.passed]
        if failed:
            logger.log("RED", f"{self.report.nok_prefix}{Texts.check_nok[self.lang]}{', '.join(failed)}")
        else:
            logger.log("GREEN", f"{self.report.ok_prefix}{Texts.check_ok[self.lang]}")
        return results


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='soliton-lab', description='gmKdV soliton laboratory')
    commands = parser.add_subparsers(dest='command', required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, help='run configuration file (key = value)')
    common.add_argument('--preset', help=f'named preset from {FileSystem.presets}')
    common.add_argument('--h', type=float, help='mesh step')
    common.add_argument('--tau', type=float, help='time step (default h^2)')
    common.add_argument('--T', type=float, help='final time')
    common.add_argument('--out', type=Path, help='output directory')
    common.add_argument('--wave', action='append', metavar='A@x0', help='replaces the configured waves')
    common.add_argument('--quiet', action='store_true', help='no progress bars')

    run = commands.add_parser('run', parents=[common], help='one run to T')
    run.add_argument('--snapshots', help='comma separated snapshot times')
    run.add_argument('--max-iters', type=int, help='iterations per time step (debug)')

    convergence = commands.add_parser('convergence', parents=[common], help='refinement sweep with tau = h^2')
    convergence.add_argument('--h-list', required=True, help='comma separated mesh steps')
    convergence.add_argument('--workers', type=int, default=1)

    profile = commands.add_parser('profile', parents=[common], help='profile table, wave sample and F(g) curve')
    profile.add_argument('--A', type=float, help='amplitude (default: first configured wave)')
    profile.add_argument('--q', type=float, help='only the F(g) curve for this q')

    check = commands.add_parser('check', parents=[common], help='discrete identity suite')
    check.add_argument('--I', type=int, default=256)
    check.add_argument('--samples', type=int, default=100)
    return parser


def overrides_from(args: argparse.Namespace) -> Dict[str, str]:
    overrides = {}
    if args.h is not None:
        overrides['mesh.h'] = repr(args.h)
    if args.tau is not None:
        overrides['mesh.tau'] = repr(args.tau)
    if args.T is not None:
        overrides['mesh.T'] = repr(args.T)
    for k, text in enumerate(args.wave or [], start=1):
        wave: WaveConfig = parse_wave(text)
        overrides[f'wave.{k}.A'] = repr(wave.A)
        overrides[f'wave.{k}.x0'] = repr(wave.x0)
    if getattr(args, 'snapshots', None):
        overrides['output.snapshots'] = ','.join(repr(t) for t in parse_snapshots(args.snapshots))
    if getattr(args, 'max_iters', None) is not None:
        overrides['debug.max_iters'] = str(args.max_iters)
    return overrides


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    warnings.showwarning = _show_warning
    try:
        lab = SolitonLab(quiet=args.quiet)
    except Exception as e:
        unexpected_error(e, 'init')
        return EXIT_UNEXPECTED
    logger.info(Texts.lab_init[lab.lang])

    try:
        if args.command == 'check':
            config = lab.load(args.config, args.preset, {}, args.out) if args.config or args.preset else None
            results = lab.check(config, args.I, args.samples)
            return 0 if all(result.passed for result in results) else EXIT_NUMERICAL
        config = lab.load(args.config, args.preset, overrides_from(args), args.out)
        if args.command == 'run':
            lab.run(config)
        elif args.command == 'convergence':
            h_list = [float(item) for item in args.h_list.split(',') if item.strip()]
            lab.convergence(config, h_list, args.workers)
        elif args.command == 'profile':
            lab.profile(config, args.q, args.A)
    except ConfigError as e:
        logger.log("RED", f"{lab.report.nok_prefix}{Texts.run_nok[lab.lang]}{expected_error(e, lab.lang)}")
        return EXIT_CONFIG
    except LabError as e:
        logger.log("RED", f"{lab.report.nok_prefix}{Texts.run_nok[lab.lang]}{expected_error(e, lab.lang)}")
        return EXIT_NUMERICAL
    except ValueError as e:
        logger.log("RED", f"{lab.report.nok_prefix}{Texts.run_nok[lab.lang]}{e}")
        return EXIT_CONFIG
    except Exception as e:
        unexpected_error(e, args.command)
        return EXIT_UNEXPECTED
    return 0


if __name__ == '__main__':
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info(Texts.interrupted[Language.en])
        sys.exit(130)
