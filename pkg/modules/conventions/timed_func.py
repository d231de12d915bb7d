import time
from functools import wraps

from loguru import logger

UNITS = (('h', 3600.0), ('min', 60.0), ('s', 1.0))


def format_time(seconds: float, precision: int = 3) -> str:
    """'1h 2min 3s' above a minute, otherwise seconds or milliseconds."""
    if seconds >= 60.0:
        parts = []
        leftover = seconds
        for suffix, length in UNITS:
            value = int(leftover // length)
            if value:
                parts.append(f'{value}{suffix}')
                leftover -= value * length
        return ' '.join(parts)
    if seconds >= 1.0:
        return f'{seconds:.{precision}g} s'
    return f'{seconds * 1e3:.{precision}g} ms'


def timed_func():
    def decorator(method):
        @wraps(method)
        def wrapped(*args, **kwargs):
            start = time.perf_counter()
            res = method(*args, **kwargs)
            logger.info(f'{method.__name__}: {format_time(time.perf_counter() - start)}')
            return res

        return wrapped

    return decorator
