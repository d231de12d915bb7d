from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Tuple

from loguru import logger

from modules.conventions.error_handling import expected_error
from modules.conventions.error_types import ConfigError, LabError
from modules.conventions.read_write import Write
from modules.conventions.text_lang import Language, Texts
from modules.conventions.variables import ConvergenceRow, NumericSettings, RunConfig, digits

if TYPE_CHECKING:
    from main import SolitonLab


def row_directory(base: Path, h: float) -> Path:
    return base / f'h_{h:g}'


def _run_row(job: Tuple[RunConfig, Language, NumericSettings]) -> ConvergenceRow:
    """Worker entry point: one row in a fresh laboratory."""
    from main import SolitonLab

    config, lang, numerics = job
    return ConvergenceSweep(SolitonLab(lang=lang, numerics=numerics, quiet=True)).run_row(config)


class ConvergenceSweep:
    """Repeats one experiment over a list of mesh steps with tau = h^2 and tabulates Er, Delta1, Delta2."""

    def __init__(self, lab_: 'SolitonLab'):
        self.lab = lab_

    def run_row(self, config: RunConfig) -> ConvergenceRow:
        h, tau = config.mesh.h, config.mesh.tau
        try:
            summary = self.lab.runner.run(config)
        except LabError as exc:
            logger.log('RED', f'{Texts.convergence_row_failed[self.lab.lang]}{h:g}: {expected_error(exc, self.lab.lang)}')
            return ConvergenceRow(h=h, tau=tau, Er=None, Delta1=None, Delta2=None, status='failed',
                                  message=exc.error_type.value)
        except (ValueError, FloatingPointError) as exc:
            logger.log('RED', f'{Texts.convergence_row_failed[self.lab.lang]}{h:g}: {type(exc).__name__}: {exc}')
            return ConvergenceRow(h=h, tau=tau, Er=None, Delta1=None, Delta2=None, status='failed',
                                  message=type(exc).__name__)
        logger.info(f'{Texts.convergence_row[self.lab.lang]}{h:g}')
        return ConvergenceRow(h=h, tau=tau, Er=summary.Er, Delta1=summary.Delta1, Delta2=summary.Delta2,
                              status=summary.status)

    @staticmethod
    def table_layout(rows: Sequence[ConvergenceRow]) -> List[Dict]:
        """One line per quantity and one column per h, as the published error tables are laid out."""
        table = []
        for quantity in ('Er', 'Delta1', 'Delta2'):
            line = {'quantity': quantity}
            line.update({f'h={row.h:g}': getattr(row, quantity) for row in rows})
            table.append(line)
        return table

    def run(self, config: RunConfig, h_list: Sequence[float], workers: int = 1,
            directory: Optional[Path] = None) -> List[ConvergenceRow]:
        if not h_list:
            raise ConfigError('empty list of mesh steps')
        directory = directory or config.output.directory
        directory.mkdir(parents=True, exist_ok=True)
        configs = [config.with_step(h, row_directory(directory, h)) for h in h_list]

        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                rows = list(executor.map(_run_row, [(row, self.lab.lang, self.lab.numerics) for row in configs]))
        else:
            rows = [self.run_row(row) for row in configs]

        header = config.header()
        header['tau'] = 'h2'
        Write.csv(directory / 'convergence_rows.csv', [row.res() for row in rows], header)
        Write.csv(directory / 'convergence_table.csv', self.table_layout(rows), header)
        Write.excel_multiple_sheets(directory / 'convergence.xlsx',
                                    {self.lab.sheet_names.rows: [row.res() for row in rows],
                                     self.lab.sheet_names.table: self.table_layout(rows)})
        Write.text(directory / 'convergence.gp',
                   ["set datafile commentschars '#'", "set datafile separator ','", "set key autotitle columnhead",
                    "set logscale xy", "set xlabel 'h'", "set terminal pngcairo size 800,600",
                    "set output 'convergence.png'",
                    "plot 'convergence_rows.csv' using 'h':'Er' with linespoints, "
                    "'' using 'h':'Delta1' with linespoints, '' using 'h':'Delta2' with linespoints"])
        logger.debug(f'Convergence rows: {[(digits % row.h, row.status) for row in rows]}')
        return rows
