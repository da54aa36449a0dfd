"""
Runtime settings read from the environment (and a .env file when present).

Command-line flags override these values; the engine itself only takes
explicit keyword arguments.
"""

import logging
import os
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, TypeVar

from dotenv import load_dotenv

from matroids.errors import InputError

LOGGER = logging.getLogger(__name__)

T = TypeVar("T")

ORACLE_LIMIT_VAR = "MATROID_ORACLE_LIMIT"
SFM_LIMIT_VAR = "MATROID_SFM_EXHAUSTIVE_LIMIT"
MKL_TOL_VAR = "MATROID_MKL_TOL"
MKL_MAX_ITER_VAR = "MATROID_MKL_MAX_ITER"


@dataclass(frozen=True)
class Settings:
    oracle_limit: int = 100_000
    sfm_exhaustive_limit: int = 12
    mkl_tol: float = 1e-10
    mkl_max_iter: int = 200_000


def _read(
    env: Mapping[str, str], name: str, parse: Callable[[str], T], default: T, minimum: T
) -> T:
    raw = env.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = parse(raw.strip())
    except ValueError as e:
        raise InputError(f"{name} must be a number, got {raw!r}") from e
    if value < minimum:
        raise InputError(f"{name} must be at least {minimum}, got {raw!r}")
    return value


def load_settings(env: Optional[Mapping[str, str]] = None) -> Settings:
    """
    Build Settings from environment variables.

    Args:
        env: Mapping to read instead of os.environ (a .env file is only loaded
            when reading the real environment)

    Returns:
        Frozen Settings with defaults for unset variables

    Raises:
        InputError: If a variable is set to a non-numeric or out-of-range value
    """
    if env is None:
        load_dotenv()
        env = os.environ
    defaults = Settings()
    settings = Settings(
        oracle_limit=_read(env, ORACLE_LIMIT_VAR, int, defaults.oracle_limit, 1),
        sfm_exhaustive_limit=_read(env, SFM_LIMIT_VAR, int, defaults.sfm_exhaustive_limit, 0),
        mkl_tol=_read(env, MKL_TOL_VAR, float, defaults.mkl_tol, 0.0),
        mkl_max_iter=_read(env, MKL_MAX_ITER_VAR, int, defaults.mkl_max_iter, 1),
    )
    if settings.mkl_tol == 0:
        raise InputError(f"{MKL_TOL_VAR} must be positive")
    LOGGER.debug("Settings: %s", settings)
    return settings
