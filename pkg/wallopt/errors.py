# wallopt/errors.py - Error classes shared by the library and the CLI

from typing import Optional


class WallOptError(Exception):
    """Base error; exit_code is what the CLI returns when this escapes a command"""

    exit_code: int = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class CatalogError(WallOptError):
    """Rebar catalog could not be built or an index is out of range"""
    exit_code = 3


class InfeasiblePressureError(WallOptError):
    """No sliding wedge exists for the given angles (phi < theta + i)"""
    exit_code = 4


class ConfigError(WallOptError):
    exit_code = 2


class DesignParseError(WallOptError):
    exit_code = 5


class OutputError(WallOptError):
    exit_code = 6


class StatsInputError(WallOptError):
    exit_code = 7
