import json
import warnings
from dataclasses import replace

import numpy as np
import pytest

from main import main
from modules.conventions.error_types import ConfigError, ConfigErrors, OverlapWarning
from modules.conventions.file_system import FileSystem
from modules.conventions.read_write import Read
from modules.conventions.variables import MGDP_EXAMPLE_2, MKDV_EXAMPLE, WaveConfig
from modules.create_config import load_run_config, parse_snapshots, parse_wave
from modules.run_convergence import row_directory
from modules.soliton_profile import eval_F
from modules.time_stepper import init_state

FAST = {'mesh.h': '0.025', 'mesh.T': '0.01'}


class TestConfig:
    def test_presets_are_shipped(self):
        assert {'mkdv-ex1', 'mkdv-ex1-steep', 'mgdp-ex2', 'mgdp-ex2-collision', 'mgdp-ex3',
                'mgdp-ex3-antisoliton', 'mgdp-ex3-collision'} <= set(FileSystem.available_presets())

    def test_preset(self):
        config = load_run_config(preset='mkdv-ex1')
        assert config.preset == 'mkdv-ex1'
        assert config.model == MKDV_EXAMPLE
        assert config.mesh.I == 1000
        assert config.mesh.tau == pytest.approx(1e-4)
        assert config.waves == [WaveConfig(A=1.2, x0=3.0)]
        assert config.exact == 'mkdv'
        assert config.output.snapshots == (0.0, 0.5, 1.0)
        assert config.output.directory == FileSystem.work / 'mkdv-ex1'
        assert config.max_iters == 2

    def test_overrides(self, tmp_path):
        config = load_run_config(preset='mgdp-ex2', overrides={'mesh.h': '0.02', 'mesh.tau': '0.001',
                                                               'wave.1.A': '0.5', 'wave.1.x0': '5'},
                                 output_dir=tmp_path)
        assert config.mesh.I == 500
        assert config.mesh.tau == 0.001
        assert config.waves == [WaveConfig(A=0.5, x0=5.0)]
        assert config.output.directory == tmp_path

    def test_file_inherits_preset(self, tmp_path):
        path = tmp_path / 'run.cfg'
        path.write_text('preset = mgdp-ex2-collision\nmesh.T = 0.5\nmesh.I = 620\n', encoding='utf-8')
        config = load_run_config(config_path=path)
        assert config.preset == 'mgdp-ex2-collision'
        assert config.model == MGDP_EXAMPLE_2
        assert config.mesh.T == 0.5 and config.mesh.I == 620
        assert [wave.A for wave in config.waves] == [1.2, 0.5]

    def test_file_waves_replace_preset_waves(self, tmp_path):
        path = tmp_path / 'run.cfg'
        path.write_text('preset = mgdp-ex2-collision\nwave.1.A = 1.0\nwave.1.x0 = 10\n', encoding='utf-8')
        assert load_run_config(config_path=path).waves == [WaveConfig(A=1.0, x0=10.0)]

    @pytest.mark.parametrize('overrides', [
        {'mesh.bogus': '1'},
        {'wave.2.A': '0.5'},
        {'wave.1.x0': '11'},
        {'mesh.h': 'fine'},
        {'output.cadence': '0'},
        {'debug.max_iters': '0'},
        {'model.c2': '-1'},
    ])
    def test_invalid(self, overrides):
        with pytest.raises(ConfigError):
            load_run_config(preset='mkdv-ex1', overrides=overrides)

    def test_exact_needs_mkdv(self):
        with pytest.raises(ConfigError):
            load_run_config(preset='mgdp-ex2', overrides={'exact': 'mkdv'})

    def test_unknown_preset(self):
        with pytest.raises(ConfigError) as info:
            load_run_config(preset='no-such-preset')
        assert info.value.error_type == ConfigErrors.unknown_preset

    def test_nothing_given(self):
        with pytest.raises(ConfigError) as info:
            load_run_config()
        assert info.value.error_type == ConfigErrors.missing_key

    def test_parsers(self):
        assert parse_wave('-1.8@3') == WaveConfig(A=-1.8, x0=3.0)
        assert parse_snapshots('1, 0.5;0') == (0.0, 0.5, 1.0)
        with pytest.raises(ConfigError):
            parse_wave('1.2')
        with pytest.raises(ConfigError):
            parse_snapshots('soon')


class TestRun:
    def test_mkdv_run(self, lab, tmp_path):
        config = load_run_config(preset='mkdv-ex1', overrides=FAST, output_dir=tmp_path)
        summary = lab.run(config)
        assert summary.status == 'OK'
        assert summary.steps == 16
        assert summary.final_t == pytest.approx(0.01)
        assert summary.Er < 0.05
        assert summary.Delta1 < 1e-6
        assert summary.velocities == [pytest.approx(1.44)]
        assert summary.peaks[0].final_value == pytest.approx(1.2, abs=0.05)
        for name in ('diagnostics.csv', 'summary.json', 'summary.txt', 'snapshot_t0.dat', 'diagnostics.gp',
                     'snapshots.gp'):
            assert (tmp_path / name).exists()
        rows = Read.csv(tmp_path / 'diagnostics.csv')
        assert rows['t'].tolist() == pytest.approx([0.0, 0.01])
        assert json.loads((tmp_path / 'summary.json').read_text())['status'] == 'OK'
        snapshot = Read.table(tmp_path / 'snapshot_t0.dat')
        assert snapshot.shape == (config.mesh.I + 1, 2)

    def test_without_waves(self, lab, tmp_path):
        config = replace(load_run_config(preset='mkdv-ex1', overrides=FAST, output_dir=tmp_path), waves=[],
                         exact='none')
        summary = lab.run(config)
        assert summary.Delta1 == 0.0 and summary.Delta2 == 0.0
        assert summary.Er is None
        assert summary.peaks == []

    def test_antisoliton_root_in_summary(self, lab, tmp_path):
        config = load_run_config(preset='mgdp-ex3-antisoliton', overrides={'mesh.h': '0.02', 'mesh.T': '0.004'},
                                 output_dir=tmp_path)
        summary = lab.runner.run(config, write=False)
        assert summary.g_star == [pytest.approx(1.73473808, abs=1e-6)]
        assert summary.peaks[0].final_value < 0
        assert summary.output_dir is None
        assert not any(tmp_path.iterdir())

    def test_inadmissible_wave(self, lab, tmp_path):
        config = load_run_config(preset='mgdp-ex2', overrides={'wave.1.A': '0.1', 'wave.1.x0': '3'},
                                 output_dir=tmp_path)
        with pytest.raises(ConfigError) as info:
            lab.run(config)
        assert info.value.error_type == ConfigErrors.inadmissible_wave

    def test_stability_advisory_flags_the_run(self, lab, tmp_path):
        overrides = dict(FAST, **{'mesh.tau': '0.001'})
        summary = lab.run(load_run_config(preset='mkdv-ex1', overrides=overrides, output_dir=tmp_path))
        assert summary.status == 'FLAG'
        assert any(text.startswith('StabilityWarning') for text in summary.advisories)

    def test_smaller_tau_loses_less_amplitude(self, lab, tmp_path):
        deficits = []
        for tau in ('0.000625', '0.00015625'):
            overrides = {'mesh.h': '0.025', 'mesh.T': '0.1', 'mesh.tau': tau}
            config = load_run_config(preset='mkdv-ex1', overrides=overrides, output_dir=tmp_path)
            summary = lab.runner.run(config, write=False)
            deficits.append(1.2 - summary.peaks[0].final_value)
        assert 0 < deficits[1] < deficits[0]


class TestConvergence:
    def test_sweep(self, lab, tmp_path):
        config = load_run_config(preset='mkdv-ex1', overrides=FAST, output_dir=tmp_path)
        rows = lab.convergence(config, [0.05, 0.025])
        assert [row.status for row in rows] == ['OK', 'OK']
        assert rows[0].tau == pytest.approx(0.05 ** 2)
        assert rows[1].Er < rows[0].Er
        for name in ('convergence_rows.csv', 'convergence_table.csv', 'convergence.xlsx', 'convergence.gp'):
            assert (tmp_path / name).exists()
        assert (row_directory(tmp_path, 0.05) / 'summary.json').exists()
        table = Read.csv(tmp_path / 'convergence_table.csv')
        assert table['quantity'].tolist() == ['Er', 'Delta1', 'Delta2']
        assert list(table.columns[1:]) == ['h=0.05', 'h=0.025']

    def test_failed_row_is_kept(self, lab, tmp_path):
        config = load_run_config(preset='mkdv-ex1', overrides=FAST, output_dir=tmp_path)
        rows = lab.convergence(config, [0.025, 5.0])
        assert [row.status for row in rows] == ['OK', 'failed']
        assert rows[1].Er is None

    def test_floating_point_failure_is_kept(self, lab, tmp_path, monkeypatch):
        config = load_run_config(preset='mkdv-ex1', overrides=FAST, output_dir=tmp_path)
        run = lab.runner.run

        def overflowing(row_config, *args, **kwargs):
            if row_config.mesh.h > 0.04:
                raise FloatingPointError('overflow encountered in multiply')
            return run(row_config, *args, **kwargs)

        monkeypatch.setattr(lab.runner, 'run', overflowing)
        rows = lab.convergence(config, [0.05, 0.025])
        assert [row.status for row in rows] == ['failed', 'OK']
        assert rows[0].message == 'FloatingPointError'
        assert rows[1].Er is not None
        assert (tmp_path / 'convergence_rows.csv').exists()

    def test_empty_list(self, lab, tmp_path):
        config = load_run_config(preset='mkdv-ex1', overrides=FAST, output_dir=tmp_path)
        with pytest.raises(ConfigError):
            lab.convergence(config, [])


class TestProfileAndCheck:
    def test_emit(self, lab, tmp_path):
        paths = lab.exporter.emit(1.2, MGDP_EXAMPLE_2, tmp_path, h=0.01, L=10.0, x0=5.0)
        table = Read.table(paths['profile'])
        assert table[0].tolist() == [0.0, 1.0]
        wave = Read.table(paths['wave'])
        assert np.max(wave[:, 1]) == pytest.approx(1.2)
        assert (tmp_path / 'F_curve.dat').exists()
        assert 'regime = 13' in paths['profile'].read_text()

    def test_emit_mkdv(self, lab, tmp_path):
        paths = lab.exporter.emit(1.2, MKDV_EXAMPLE, tmp_path)
        assert Read.table(paths['profile'])[0].tolist() == [0.0, 1.0]
        assert 'F_curve' not in paths

    def test_emit_rejects(self, lab, tmp_path):
        with pytest.raises(ConfigError):
            lab.exporter.emit(0.1, MGDP_EXAMPLE_2, tmp_path)

    def test_curve(self, lab, tmp_path):
        lab.exporter.curve(0.148, 0.5, tmp_path)
        curve = Read.table(tmp_path / 'F_curve.dat')
        header = (tmp_path / 'F_curve.dat').read_text().splitlines()
        g0 = float(next(line for line in header if line.startswith('# g0 = ')).split('=')[1])
        assert g0 == pytest.approx(0.175, abs=5e-3)
        assert abs(eval_F(g0, 0.148, 0.5)) < 1e-12
        assert curve[0, 1] == pytest.approx(-(0.2 - 2 / 3 * 0.148))

    def test_identities(self, lab, tmp_path):
        results = lab.check(None, I=64, samples=10)
        assert len(results) == 12
        failed = [(result.name, result.max_error, result.scale) for result in results if not result.passed]
        assert failed == []

    def test_identities_written(self, lab, tmp_path):
        config = load_run_config(preset='mgdp-ex3', output_dir=tmp_path)
        lab.check(config, I=64, samples=3)
        assert len(Read.csv(tmp_path / 'identity_check.csv')) == 12


class TestCommandLine:
    def test_run(self, tmp_path):
        code = main(['run', '--preset', 'mkdv-ex1', '--h', '0.025', '--T', '0.01', '--snapshots', '0,0.01',
                     '--out', str(tmp_path), '--quiet'])
        assert code == 0
        assert (tmp_path / 'summary.json').exists()
        assert (tmp_path / 'snapshot_t0.01.dat').exists()

    def test_unknown_preset(self, tmp_path):
        assert main(['run', '--preset', 'no-such-preset', '--out', str(tmp_path), '--quiet']) == 2

    def test_inadmissible_wave(self, tmp_path):
        assert main(['run', '--preset', 'mgdp-ex2', '--wave', '0.1@3', '--out', str(tmp_path), '--quiet']) == 2

    def test_profile(self, tmp_path):
        assert main(['profile', '--preset', 'mgdp-ex2', '--out', str(tmp_path)]) == 0
        assert Read.table(tmp_path / 'profile.dat')[0].tolist() == [0.0, 1.0]

    def test_curve(self, tmp_path):
        assert main(['profile', '--preset', 'mgdp-ex2', '--q', '0.148', '--out', str(tmp_path)]) == 0
        assert (tmp_path / 'F_curve.dat').exists()
        assert not (tmp_path / 'profile.dat').exists()

    def test_check(self):
        assert main(['check', '--I', '64', '--samples', '5']) == 0

    def test_convergence(self, tmp_path):
        code = main(['convergence', '--preset', 'mkdv-ex1', '--T', '0.01', '--h-list', '0.05,0.025',
                     '--out', str(tmp_path), '--quiet'])
        assert code == 0
        assert (tmp_path / 'convergence.xlsx').exists()


MKDV_STEPS = [0.02, 0.0125, 0.01, 0.0071, 0.0055, 0.005, 0.0041]


@pytest.mark.slow
class TestReferenceRuns:
    def test_mkdv_sweep(self, lab, tmp_path):
        config = load_run_config(preset='mkdv-ex1', output_dir=tmp_path)
        rows = lab.convergence(config, MKDV_STEPS, workers=4)
        errors = [row.Er for row in rows]
        assert all(row.status != 'failed' for row in rows)
        assert errors == sorted(errors, reverse=True)
        # time damping with tau = h^2 keeps Er(0.02) near 0.66 and Er(0.0041) near 0.039
        assert errors[0] < 0.8
        assert errors[-1] < 0.05
        order = np.log(errors[0] / errors[-1]) / np.log(MKDV_STEPS[0] / MKDV_STEPS[-1])
        assert 1.5 <= order <= 2.2
        assert all(row.Delta1 <= 2e-4 for row in rows)
        assert rows[-1].Delta1 <= 1e-5
        assert all(row.Delta2 <= 1e-4 for row in rows)

    def test_mkdv_coarse_shape(self, lab, tmp_path):
        summary = lab.runner.run(load_run_config(preset='mkdv-ex1', overrides={'mesh.h': '0.02'},
                                                 output_dir=tmp_path), write=False)
        assert summary.peaks[0].final_value == pytest.approx(1.2, rel=0.1)
        assert summary.peaks[0].speed == pytest.approx(1.44, rel=0.1)

    def test_mgdp_ex2(self, lab, tmp_path):
        summary = lab.runner.run(load_run_config(preset='mgdp-ex2', output_dir=tmp_path), write=False)
        assert summary.h == pytest.approx(0.0045)
        assert summary.peaks[0].final_value == pytest.approx(1.2, rel=0.02)
        assert summary.peaks[0].speed == pytest.approx(summary.velocities[0], rel=0.02)
        assert summary.Delta1 <= 1e-2
        assert summary.Delta2 <= 1e-2

    def test_mgdp_ex3(self, lab, tmp_path):
        summary = lab.runner.run(load_run_config(preset='mgdp-ex3', output_dir=tmp_path), write=False)
        assert summary.h == pytest.approx(0.0052)
        assert summary.peaks[0].final_value == pytest.approx(1.5, rel=0.02)
        assert summary.peaks[0].speed == pytest.approx(summary.velocities[0], rel=0.02)
        assert summary.Delta1 <= 5e-3
        assert summary.Delta2 <= 0.1

    def test_antisoliton_to_end_time(self, lab, tmp_path):
        summary = lab.run(load_run_config(preset='mgdp-ex3-antisoliton', overrides={'mesh.h': '0.02'},
                                          output_dir=tmp_path))
        assert summary.final_t == pytest.approx(1.0)
        assert summary.peaks[0].final_value == pytest.approx(-1.8, rel=0.15)

    @pytest.mark.parametrize('preset', ['mgdp-ex2-collision', 'mgdp-ex3-collision'])
    def test_collision(self, lab, tmp_path, preset):
        config = load_run_config(preset=preset, output_dir=tmp_path)
        summary = lab.run(config)
        assert summary.final_t == pytest.approx(config.mesh.T)
        rows = Read.csv(tmp_path / 'diagnostics.csv')
        before = rows[rows['t'] <= 8.0]['Delta1'].iloc[-1]
        assert summary.Delta1 <= 10 * before
        faster, slower = summary.peaks
        assert np.sign(faster.final_value) == np.sign(faster.initial_amplitude)
        assert np.sign(slower.final_value) == np.sign(slower.initial_amplitude)
        if preset == 'mgdp-ex2-collision':
            assert faster.final_position > slower.final_position
            assert faster.final_value > slower.final_value

    @pytest.mark.parametrize('preset', ['mgdp-ex2-collision', 'mgdp-ex3-collision'])
    def test_collision_start(self, lab, preset):
        config = load_run_config(preset=preset)
        waves = lab.runner.build_waves(config)
        with warnings.catch_warnings():
            warnings.simplefilter('error', OverlapWarning)
            y = init_state(waves, config.mesh, config.model)
        assert y.satisfies_boundary()
        faster, slower = waves
        assert faster.velocity > slower.velocity
        assert faster.x0 < slower.x0
