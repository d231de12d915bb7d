import traceback
from typing import Optional
from loguru import logger

from modules.conventions.error_types import LabError, error_messages
from modules.conventions.text_lang import Language


def unexpected_error(exc, additional_logging: Optional[str] = ''):
    logger.warning(f'{additional_logging} | UNEXPECTED ERROR: {traceback.format_exc()} | Exception: {repr(exc)}')


def expected_error(exc: LabError, lang: Language) -> str:
    """Formats a LabError as 'CODE: message | detail' in the configured language."""
    message = error_messages(lang).get(exc.error_type.value, '')
    return f'{exc.error_type.value}: {message} | {exc.detail}'
