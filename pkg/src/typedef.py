"""
Custom type definitions.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import TypedDict


# custom dict type for Pipelines
class FileDict(TypedDict):
    """
    Dictionary type for pipeline paths.

    :param figures_dir: The full path to the directory where figures
        are saved. Figures will be saved directly under this path.
    :param data_dir: The full path to the directory where the output
        of the pipeline is saved. Artifacts (volumes, maps, models,
        tables) will be saved directly under this path.
    :param figures_file_stem: The stem of the file name for figures, i.e.
        the name of the file without the file extension. This name might
        be extended by additional qualifiers (e.g. indices etc.), so it
        might not be equivalent to the final file stem.
    :param data_file_stem: The stem of the file name for data files,
        i.e. the name of the file name without file extension.
    """
    figures_dir: str | Path
    data_dir: str | Path
    figures_file_stem: str
    data_file_stem: str


class FileDictIO(FileDict):
    """
    FileDict with additional input directory.

    Used by all pipelines that consume the output of an earlier stage.

    :param figures_dir: The full path to the directory where figures
        are saved.
    :param data_dir: The full path to the directory where the output
        of the pipeline is saved.
    :param figures_file_stem: The stem of the file name for figures.
    :param data_file_stem: The stem of the file name for data files.
    :param input_dir: The full path to the directory holding the output
        of the previous stage, i.e. the input of this pipeline.
    """
    figures_dir: str | Path
    data_dir: str | Path
    figures_file_stem: str
    data_file_stem: str
    input_dir: str | Path


@dataclass(frozen=True)
class Rejected:
    """
    Outcome of an operation that declined its input.

    Rejections are values rather than exceptions wherever declining an
    input is part of normal operation, e.g. when binarizing generated
    pores or when a pore placement would merge two pores.

    :param reason: Short human-readable reason for the rejection.
    """
    reason: str

    def __bool__(self) -> bool:
        return False
