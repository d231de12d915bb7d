import os
from pathlib import Path


class FileSystem:
    __CODE_FOLDER = Path(os.path.dirname(os.path.realpath(__file__)) + '/../../')
    templates = __CODE_FOLDER / 'templates'
    presets = templates / 'presets'
    config = __CODE_FOLDER / 'config.ini'
    work = __CODE_FOLDER / 'work'

    @staticmethod
    def preset(name: str) -> Path:
        return FileSystem.presets / f'{name}.cfg'

    @staticmethod
    def available_presets():
        return sorted(path.stem for path in FileSystem.presets.glob('*.cfg'))
