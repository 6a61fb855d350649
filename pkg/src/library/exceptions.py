"""
Exception hierarchy of the project.

Every exception raised deliberately by the library derives from
:class:`PorosynthError` and carries the exit code that command line
scripts use when the exception terminates a pipeline.
"""
from __future__ import annotations

from pathlib import Path
from typing import Any, Sequence


class PorosynthError(Exception):
    """Base class of all project errors"""

    exit_code: int = 1


class ConfigError(PorosynthError):
    """Raised for invalid configuration or invalid parameters"""

    exit_code = 2


class DataError(PorosynthError):
    """Raised for missing, malformed or unusable data"""

    exit_code = 3


class NumericDivergenceError(PorosynthError):
    """Raised when an iterative computation produces non-finite values"""

    exit_code = 4


# configuration errors
class MissingConfigFileError(ConfigError):
    """Raised when the config file does not exist"""

    def __init__(self, path: Path | None = None, *args: Sequence[Any]):
        if path is None:
            msg = (
                "No config file for the project exists. Create a config file "
                "by running the `install.py` script at the project root."
            )
        else:
            msg = f"The config file {path} does not exist."
        super().__init__(msg, *args)


class InvalidConfigPathError(ConfigError):
    """Raise when a config contains or receives invalid paths"""

    def __init__(self, path: str | Path, *args: object) -> None:
        super().__init__(*args)
        if not isinstance(path, Path):
            path = Path(path)
        self.path = path

    def __str__(self) -> str:
        if not self.path.exists():
            return f"The path {self.path} does not exist"
        elif not self.path.is_dir():
            return f"The path {self.path} does not point to a directory"
        else:
            return f"The path {self.path} is not a valid path"


class MissingSeedError(ConfigError):
    """Raised when a generation command runs without an explicit seed"""

    def __init__(self, command: str, *args: Sequence[Any]) -> None:
        msg = (
            f"The command {command} requires an explicit seed. Set it with "
            f"--seed or with the `seed` entry of the config file."
        )
        super().__init__(msg, *args)


class ScaleTooLarge(ConfigError):
    """Raised when 2^J exceeds the image side"""


class EnsembleTooSmall(ConfigError):
    """Raised when an ensemble has fewer than two members"""


class TooManyMembers(ConfigError):
    """Raised when more translations are requested than distinct shifts exist"""


class WindowTooSmall(ConfigError):
    """Raised when a filter or moving window is too small to be used"""


# data errors
class InvalidVolumeError(DataError):
    """Raised when voxel data violates the volume invariants"""


class PoreTooLarge(DataError):
    """Raised when a pore does not fit into the requested cube"""


class InsufficientPores(DataError):
    """Raised when a population statistic needs more pores"""


class EmptySlice(DataError):
    """Raised when a z-slice contains no part voxels"""


class DoesNotFit(DataError):
    """Raised when a surface does not fit into the requested grid"""


class SizeMismatch(DataError):
    """Raised when an image does not match the filter bank"""


class ShapeMismatch(DataError):
    """Raised when tensor shapes are incompatible with an operation"""

    def __init__(
        self,
        op: str,
        first: tuple[int, ...],
        second: tuple[int, ...],
        *args: object,
    ) -> None:
        msg = (
            f"Operation {op} received incompatible shapes {first} and "
            f"{second}."
        )
        super().__init__(msg, *args)
        self.shapes = (first, second)


class GraphConsumedError(DataError):
    """Raised when backward is called twice on the same graph"""


class EmptyDataset(DataError):
    """Raised when training receives no samples"""


class NoPores(DataError):
    """Raised when a model is fitted without any pores"""


class EmptyBank(DataError):
    """Raised when a pore is requested from an empty bank"""


class AcceptanceTooLow(DataError):
    """Raised when the pore bank plausibility filter rejects nearly all"""


# numeric errors
class Diverged(NumericDivergenceError):
    """Raised when a loss becomes non-finite"""
