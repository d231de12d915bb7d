from enum import Enum
from typing import Dict

from modules.conventions.text_lang import Language


class ProfileErrors(Enum):
    domain = 'PROFILE_R_OUT_OF_RANGE'
    no_root = 'PROFILE_NO_ROOT'
    no_solution = 'PROFILE_NO_SOLUTION'
    condition_7 = 'PROFILE_VELOCITY_CONDITION'
    stagnation = 'PROFILE_STAGNATION'


class SchemeErrors(Enum):
    stencil_index = 'STENCIL_OUT_OF_RANGE'
    length_mismatch = 'LENGTH_MISMATCH'
    singular = 'PENTA_SINGULAR'
    domain_too_small = 'DOMAIN_TOO_SMALL'
    blow_up = 'RUN_BLOW_UP'


class ConfigErrors(Enum):
    unknown_preset = 'CONFIG_UNKNOWN_PRESET'
    missing_key = 'CONFIG_MISSING_KEY'
    invalid_value = 'CONFIG_INVALID_VALUE'
    model_invariant = 'CONFIG_MODEL_INVARIANT'
    inadmissible_wave = 'CONFIG_INADMISSIBLE_WAVE'


_MESSAGES = {
    ProfileErrors.domain: {Language.en: 'r must lie strictly between 0 and 1',
                           Language.dk: 'r skal ligge strengt mellem 0 og 1'},
    ProfileErrors.no_root: {Language.en: 'F(g, q) has no root in the search interval',
                            Language.dk: 'F(g, q) har ingen rod i søgeintervallet'},
    ProfileErrors.no_solution: {Language.en: 'no self-consistent amplitude-velocity pair exists',
                                Language.dk: 'der findes ikke et selvkonsistent amplitude-hastighedspar'},
    ProfileErrors.condition_7: {Language.en: 'gamma + alpha^2 V must be positive',
                                Language.dk: 'gamma + alpha^2 V skal være positiv'},
    ProfileErrors.stagnation: {Language.en: 'profile integration does not approach g = 1',
                               Language.dk: 'profilintegrationen nærmer sig ikke g = 1'},
    SchemeErrors.stencil_index: {Language.en: 'stencil reaches outside the mesh',
                                 Language.dk: 'stencilen rækker uden for nettet'},
    SchemeErrors.length_mismatch: {Language.en: 'arrays do not match the mesh',
                                   Language.dk: 'arrays passer ikke til nettet'},
    SchemeErrors.singular: {Language.en: 'pentadiagonal system is singular to working precision',
                            Language.dk: 'det femdiagonale system er singulært'},
    SchemeErrors.domain_too_small: {Language.en: 'a wave reaches the boundary band',
                                    Language.dk: 'en bølge når ind i randbåndet'},
    SchemeErrors.blow_up: {Language.en: 'the solution blew up',
                           Language.dk: 'løsningen eksploderede'},
    ConfigErrors.unknown_preset: {Language.en: 'unknown preset',
                                  Language.dk: 'ukendt forudindstilling'},
    ConfigErrors.missing_key: {Language.en: 'required configuration key is missing',
                               Language.dk: 'påkrævet konfigurationsnøgle mangler'},
    ConfigErrors.invalid_value: {Language.en: 'configuration value cannot be used',
                                 Language.dk: 'konfigurationsværdien kan ikke bruges'},
    ConfigErrors.model_invariant: {Language.en: 'model coefficients violate the model restrictions',
                                   Language.dk: 'modelkoefficienterne bryder modellens betingelser'},
    ConfigErrors.inadmissible_wave: {Language.en: 'wave amplitude is not admissible',
                                     Language.dk: 'bølgeamplituden er ikke tilladt'},
}


def error_messages(lang: Language) -> Dict[str, str]:
    return {error_type.value: texts[lang] for error_type, texts in _MESSAGES.items()}


class LabError(Exception):
    error_type: Enum = SchemeErrors.length_mismatch

    def __init__(self, detail: str = '', error_type: Enum = None):
        if error_type is not None:
            self.error_type = error_type
        self.detail = detail
        super().__init__(f'{self.error_type.value}: {detail}')


class ProfileDomainError(LabError, ValueError):
    error_type = ProfileErrors.domain


class NoRootError(LabError):
    error_type = ProfileErrors.no_root


class NoSolutionError(LabError):
    error_type = ProfileErrors.no_solution


class ViolatedCondition7(NoSolutionError):
    error_type = ProfileErrors.condition_7


class StagnationError(LabError):
    error_type = ProfileErrors.stagnation


class StencilIndexError(LabError, IndexError):
    error_type = SchemeErrors.stencil_index


class LengthMismatchError(LabError, ValueError):
    error_type = SchemeErrors.length_mismatch


class SingularSystemError(LabError):
    error_type = SchemeErrors.singular


class DomainTooSmall(LabError):
    error_type = SchemeErrors.domain_too_small


class BlowUpError(LabError):
    error_type = SchemeErrors.blow_up


class ConfigError(LabError):
    error_type = ConfigErrors.invalid_value


class DivergenceWarning(UserWarning):
    """Picard increments of one time step did not contract."""


class BoundaryWarning(UserWarning):
    """The solution is not small inside a boundary band."""


class OverlapWarning(UserWarning):
    """Initial waves overlap above the separation threshold."""


class StabilityWarning(UserWarning):
    """Step sizes exceed the advisory mesh condition."""
