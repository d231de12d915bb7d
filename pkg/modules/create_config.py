import configparser
import os
import re
import sys
from pathlib import Path
from typing import Dict, List, Mapping, Optional

from loguru import logger

from modules.conventions.error_types import ConfigError, ConfigErrors
from modules.conventions.file_system import FileSystem
from modules.conventions.text_lang import Language, Texts
from modules.conventions.variables import DEFAULT_EPSILON, DEFAULT_ITERATIONS, Mesh, ModelParams, NumericSettings, \
    OutputConfig, RunConfig, WaveConfig

RUN_SECTION = 'run'
MODEL_KEYS = ('alpha', 'gamma', 'c0', 'c1', 'c2', 'c3')
WAVE_KEY = re.compile(r'^wave\.(\d+)\.(A|x0)$')
KNOWN_KEYS = {'preset', 'exact', 'debug.max_iters', 'output.dir', 'output.snapshots', 'output.cadence',
              'model.epsilon', 'mesh.L', 'mesh.h', 'mesh.I', 'mesh.T', 'mesh.tau'} \
    | {f'model.{key}' for key in MODEL_KEYS}


def write_config(language: str, numerics: Optional[NumericSettings] = None, path: Path = FileSystem.config):
    numerics = numerics or NumericSettings()
    config = configparser.ConfigParser()

    config['Settings'] = {'language': language}
    config['Numerics'] = {key: str(value) for key, value in vars(numerics).items()}
    with open(path, 'w') as configfile:
        config.write(configfile)


def load_config(path: Path = FileSystem.config):
    config = configparser.ConfigParser()
    config.read(path)
    return config


def get_language(path: Path = FileSystem.config) -> Language:
    config = load_config(path)
    return [x for x in Language if x.value == config.get('Settings', 'language', fallback='en')][0]


def get_numerics(path: Path = FileSystem.config) -> NumericSettings:
    config = load_config(path)
    defaults = NumericSettings()
    if not config.has_section('Numerics'):
        return defaults
    section = config['Numerics']
    return NumericSettings(tail_tolerance=section.getfloat('tail_tolerance', defaults.tail_tolerance),
                           stability_q1=section.getfloat('stability_q1', defaults.stability_q1),
                           stability_q2=section.getfloat('stability_q2', defaults.stability_q2),
                           boundary_band=section.getint('boundary_band', defaults.boundary_band))


def create_config(language: Optional[str] = None, path: Path = FileSystem.config):
    """Writes the settings file. Asks for the language only in an interactive terminal."""
    language = language or os.environ.get('CONFIG_LANG')
    if language is None and sys.stdin.isatty():
        print("Welcome to the language configuration setup.")
        while language not in [val.value for val in Language]:
            language = input("Enter your preferred language code (dk/en): ")
    if language not in [val.value for val in Language]:
        language = Language.en.value
    write_config(language, path=path)
    logger.info(Texts.config_completed[get_language(path)])


def _read_flat(path: Path) -> Dict[str, str]:
    if not path.exists():
        raise ConfigError(str(path), ConfigErrors.missing_key)
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    parser.read_string(f'[{RUN_SECTION}]\n' + path.read_text(encoding='utf-8'), source=str(path))
    return dict(parser[RUN_SECTION])


def read_preset(name: str) -> Dict[str, str]:
    path = FileSystem.preset(name)
    if not path.exists():
        raise ConfigError(f'{name} (known: {", ".join(FileSystem.available_presets())})',
                          ConfigErrors.unknown_preset)
    return _read_flat(path)


def _number(values: Mapping[str, str], key: str, default: Optional[float] = None) -> Optional[float]:
    if key not in values or values[key].strip() == '':
        if default is None:
            return None
        return default
    try:
        return float(values[key])
    except ValueError:
        raise ConfigError(f'{key} = {values[key]!r} is not a number')


def _required(values: Mapping[str, str], key: str) -> float:
    value = _number(values, key)
    if value is None:
        raise ConfigError(key, ConfigErrors.missing_key)
    return value


def parse_snapshots(text: str) -> tuple:
    try:
        return tuple(sorted(float(item) for item in text.replace(';', ',').split(',') if item.strip()))
    except ValueError:
        raise ConfigError(f'snapshots = {text!r}')


def parse_wave(text: str) -> WaveConfig:
    """'A@x0' as given on the command line."""
    try:
        amplitude, position = text.split('@')
        return WaveConfig(A=float(amplitude), x0=float(position))
    except ValueError:
        raise ConfigError(f'wave {text!r} must read A@x0')


def _waves(values: Mapping[str, str]) -> List[WaveConfig]:
    found: Dict[int, Dict[str, float]] = {}
    for key in values:
        match = WAVE_KEY.match(key)
        if match:
            found.setdefault(int(match.group(1)), {})[match.group(2)] = _number(values, key)
    waves = []
    for index in sorted(found):
        if set(found[index]) != {'A', 'x0'}:
            raise ConfigError(f'wave.{index} needs both A and x0', ConfigErrors.missing_key)
        waves.append(WaveConfig(A=found[index]['A'], x0=found[index]['x0']))
    return waves


def _mesh(values: Mapping[str, str]) -> Mesh:
    L = _required(values, 'mesh.L')
    T = _required(values, 'mesh.T')
    if 'mesh.I' in values:
        I = int(_required(values, 'mesh.I'))
        if I <= 0:
            raise ConfigError(f'mesh.I = {I}')
        h = L / I
    else:
        h = _required(values, 'mesh.h')
        if h <= 0:
            raise ConfigError(f'mesh.h = {h}')
    tau_rule = values.get('mesh.tau', 'h2').strip()
    tau = None if tau_rule == 'h2' else _number(values, 'mesh.tau')
    return Mesh.from_step(L=L, h=h, T=T, tau=tau)


def build_run_config(values: Mapping[str, str], output_dir: Optional[Path] = None) -> RunConfig:
    unknown = [key for key in values if key not in KNOWN_KEYS and not WAVE_KEY.match(key)]
    if unknown:
        raise ConfigError(f'unknown keys {sorted(unknown)}', ConfigErrors.invalid_value)

    model = ModelParams(**{key: _required(values, f'model.{key}') for key in MODEL_KEYS},
                        epsilon=_number(values, 'model.epsilon', DEFAULT_EPSILON))
    preset = values.get('preset', 'custom')
    directory = output_dir or Path(values.get('output.dir', FileSystem.work / preset))
    output = OutputConfig(directory=Path(directory),
                          snapshots=parse_snapshots(values.get('output.snapshots', '')),
                          cadence=int(_number(values, 'output.cadence', 100)))
    if output.cadence < 1:
        raise ConfigError(f'output.cadence = {output.cadence}')
    config = RunConfig(preset=preset, model=model, mesh=_mesh(values), waves=_waves(values), output=output,
                       exact=values.get('exact', 'none').strip(),
                       max_iters=int(_number(values, 'debug.max_iters', DEFAULT_ITERATIONS)))
    config.check()
    return config


def load_run_config(config_path: Optional[Path] = None, preset: Optional[str] = None,
                    overrides: Optional[Mapping[str, str]] = None, output_dir: Optional[Path] = None) -> RunConfig:
    """
    Layers the preset file, the config file and the command-line overrides, in that order.

    A config file naming a preset inherits the preset's keys. Overrides that replace
    the wave list (any wave.* key) drop the waves of the lower layers.
    """
    from_file = _read_flat(Path(config_path)) if config_path else {}
    preset = preset or from_file.get('preset')
    values = read_preset(preset) if preset else {}
    for layer in (from_file, dict(overrides or {})):
        if any(WAVE_KEY.match(key) for key in layer):
            values = {key: value for key, value in values.items() if not WAVE_KEY.match(key)}
        if 'mesh.h' in layer:
            values.pop('mesh.I', None)
        values.update(layer)
    if preset:
        values['preset'] = preset
    if not values:
        raise ConfigError('give --preset or --config', ConfigErrors.missing_key)
    return build_run_config(values, output_dir)


if __name__ == '__main__':
    create_config()
