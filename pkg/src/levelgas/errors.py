"""Exception types raised across the package.

Each carries a short ``category`` string that the CLI maps to exit codes.
"""

from __future__ import annotations


class LevelGasError(Exception):
    category = "error"


class NonHermitianInput(LevelGasError, ValueError):
    category = "input"


class AmbiguousAlignment(LevelGasError):
    category = "alignment"

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message if t is None else f"{message} (t={t!r})")
        self.t = t


class DegenerateLevels(LevelGasError):
    category = "degeneracy"

    def __init__(self, message: str, t: float | None = None, pair: tuple[int, int] | None = None):
        detail = message
        if pair is not None:
            detail += f" between levels {pair[0]} and {pair[1]}"
        if t is not None:
            detail += f" at t={t!r}"
        super().__init__(detail)
        self.t = t
        self.pair = pair


class DimensionMismatch(LevelGasError, ValueError):
    category = "input"


class OutOfRange(LevelGasError, ValueError):
    category = "input"


class InvalidSchedule(LevelGasError, ValueError):
    category = "config"


class NonPositiveStep(LevelGasError, ValueError):
    category = "input"


class GridMismatch(LevelGasError, ValueError):
    category = "grid"


class SchemaMismatch(LevelGasError, ValueError):
    category = "schema"


class ConfigError(LevelGasError, ValueError):
    category = "config"
