import dataclasses
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from library import constants
from library.data_acquisition.synthetic_parts import SyntheticPartConfig
from library.exceptions import (
    ConfigError,
    InvalidConfigPathError,
    MissingConfigFileError,
    MissingSeedError,
)
from library.gan.training import TrainConfig
from library.synthesis.microcanonical import SynthConfig

THREADS_VARIABLE = "POROSYNTH_THREADS"

NESTED_SECTIONS = {
    "gan": TrainConfig,
    "synth": SynthConfig,
    "synthetic": SyntheticPartConfig,
}


def root_dir() -> Path:
    """Return the project root, the directory holding ``config.yaml``."""
    return Path(__file__).parent.resolve().parents[2]


@dataclass
class PipelineConfig:
    """
    Hold the runtime configuration of all pipelines.

    Instances of this class make it easy to run the same code with
    different parameters, e.g. a quick desk profile for testing and the
    full profile for actual runs. Values are read from the ``pipeline``
    section of the config file and can be overridden per run.

    :param data_home: Directory under which all artifacts are saved.
    :param figures_home: Directory under which all figures are saved.
    :param seed: Base seed of all generation commands; None if unset.
    :param threads: Cap on worker processes; 0 means no cap.
    :param voxel_size: Voxel edge length in micrometres.
    :param connectivity: Pore connectivity, 6 or 26.
    :param min_pore_voxels: Smallest pore kept by deconstruction.
    :param n_theta: Angular samples of unrolled surface maps.
    :param savgol_window_um: Window of the Savitzky-Golay smoothing.
    :param savgol_order: Polynomial order of the smoothing.
    :param n_bins: Bins per axis of the spatial model.
    :param window_dz: Length of the assembly window in voxels.
    :param placement_retries: Relocations per pore before skipping.
    :param bank_size: Number of pores in a generated bank.
    :param gan: Hyperparameters of GAN training.
    :param synth: Parameters of surface synthesis.
    :param synthetic: Parameters of the synthetic ground truth.
    """
    data_home: Path
    figures_home: Path
    seed: int | None = None
    threads: int = 0
    voxel_size: float = constants.VOXEL_SIZE
    connectivity: int = constants.CONNECTIVITY
    min_pore_voxels: int = constants.MIN_PORE_VOXELS
    n_theta: int = 512
    savgol_window_um: float = constants.SAVGOL_WINDOW_UM
    savgol_order: int = constants.SAVGOL_ORDER
    n_bins: int = constants.N_BINS
    window_dz: int = constants.WINDOW_DZ_VOXELS
    placement_retries: int = constants.PLACEMENT_RETRIES
    bank_size: int = constants.BANK_SIZE
    gan: TrainConfig = field(default_factory=TrainConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)
    synthetic: SyntheticPartConfig = field(default_factory=SyntheticPartConfig)

    def __post_init__(self):
        if self.connectivity not in (6, 26):
            raise ConfigError(
                f"Connectivity must be 6 or 26, got {self.connectivity}."
            )
        if self.threads < 0:
            raise ConfigError(f"Thread cap must be non-negative, got {self.threads}.")
        for name in ("n_theta", "n_bins", "bank_size", "min_pore_voxels"):
            if getattr(self, name) < 1:
                raise ConfigError(
                    f"Config entry {name} must be positive, got "
                    f"{getattr(self, name)}."
                )

    @property
    def profile(self) -> str:
        """Network profile flag, ``desk`` or ``full``."""
        return self.gan.profile

    @property
    def cube_side(self) -> int:
        return constants.PROFILES[self.profile]["side"]

    def parameters(self) -> dict[str, Any]:
        """All parameters except the directories, as plain values."""
        values = dataclasses.asdict(self)
        values.pop("data_home")
        values.pop("figures_home")
        return values

    @property
    def config_hash(self) -> str:
        """First twelve hex digits of the SHA-256 of the parameters."""
        dump = json.dumps(self.parameters(), sort_keys=True, default=str)
        return hashlib.sha256(dump.encode("utf-8")).hexdigest()[:12]

    def require_seed(self, command: str) -> int:
        """
        Return the seed of a generation command.

        :param command: Name of the command, for the error message.
        :raises MissingSeedError: If no seed was configured.
        :return: The seed.
        """
        if self.seed is None:
            raise MissingSeedError(command)
        return self.seed

    def clamp_processes(self, processes: int) -> int:
        """Limit a requested process count to the thread cap."""
        if self.threads and processes > self.threads:
            logging.info(
                f"Clamping {processes} processes to the cap of {self.threads}."
            )
            return self.threads
        return processes


def _resolve_home(value: str, root: Path, default: str) -> Path:
    if value == "default":
        return root / default
    elif Path(value).is_absolute():
        return Path(value).resolve()
    else:
        return root / value


def apply_overrides(
    values: dict[str, Any], overrides: Mapping[str, Any] | None
) -> dict[str, Any]:
    """
    Apply dotted-key overrides such as ``{"gan.epochs": 5}``.

    :param values: Nested dictionary of config values; not altered.
    :param overrides: Mapping of dotted keys to new values. Entries
        with value None are skipped.
    :return: A new nested dictionary.
    """
    result = {
        key: dict(value) if isinstance(value, dict) else value
        for key, value in values.items()
    }
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        *sections, name = key.split(".")
        target = result
        for section in sections:
            target = target.setdefault(section, {})
            if not isinstance(target, dict):
                raise ConfigError(f"Cannot override {key}: {section} is not a section.")
        target[name] = value
    return result


def _build(values: dict[str, Any], data_home: Path, figures_home: Path) -> PipelineConfig:
    kwargs = dict(values)
    try:
        for section, cls in NESTED_SECTIONS.items():
            if section in kwargs:
                kwargs[section] = cls(**kwargs[section])
        return PipelineConfig(data_home, figures_home, **kwargs)
    except TypeError as exc:
        raise ConfigError(f"Invalid pipeline configuration: {exc}") from exc


def _thread_cap(configured: int) -> int:
    """Combine the configured cap with the environment variable."""
    raw = os.environ.get(THREADS_VARIABLE)
    if raw is None:
        return configured
    try:
        env_cap = int(raw)
    except ValueError:
        raise ConfigError(
            f"{THREADS_VARIABLE} must be an integer, got {raw!r}."
        ) from None
    if env_cap < 1:
        return configured
    return min(configured, env_cap) if configured else env_cap


def get_pipeline_config(
    config_file: str | Path | None = None,
    overrides: Mapping[str, Any] | None = None,
    verify_paths: bool = True,
) -> PipelineConfig:
    """
    Return the pipeline configuration.

    The configuration is read from ``config.yaml`` at the project root
    unless another YAML or JSON file is given. Relative directories are
    taken relative to the project root; ``default`` means ``data`` and
    ``figures`` under the root.

    :param config_file: Alternative config file.
    :param overrides: Dotted-key overrides of ``pipeline`` entries.
    :param verify_paths: Whether the data and figure homes must exist.
    :raises MissingConfigFileError: If the config file does not exist.
    :raises InvalidConfigPathError: If a home directory is invalid.
    :raises ConfigError: If an entry is unknown or invalid.
    :return: The validated configuration.
    """
    root = root_dir()
    if config_file is None:
        config_file = root / "config.yaml"
        if not config_file.exists():
            raise MissingConfigFileError()
    config_file = Path(config_file)
    if not config_file.exists():
        raise MissingConfigFileError(config_file)
    with open(config_file, "r") as file:
        stream = file.read()
    try:
        content = yaml.safe_load(stream) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"Cannot parse config file {config_file}: {exc}") from exc

    paths = content.get("paths", {})
    data_home = _resolve_home(paths.get("data_home", "default"), root, "data")
    figures_home = _resolve_home(paths.get("figures_home", "default"), root, "figures")
    if verify_paths:
        for path in (data_home, figures_home):
            if not path.exists() or not path.is_dir():
                raise InvalidConfigPathError(path)

    values = apply_overrides(content.get("pipeline", {}) or {}, overrides)
    values["threads"] = _thread_cap(int(values.get("threads", 0)))
    cfg = _build(values, data_home, figures_home)
    logging.debug(f"Loaded configuration {cfg.config_hash} from {config_file}.")
    return cfg


def default_config_text() -> str:
    """Content of a fresh ``config.yaml`` with all pipeline defaults."""
    defaults = PipelineConfig(Path("data"), Path("figures")).parameters()
    content = {
        "paths": {"data_home": "default", "figures_home": "default"},
        "pipeline": defaults,
    }
    return yaml.safe_dump(content, sort_keys=False)
