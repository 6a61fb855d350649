"""
Shared fixtures of the pipeline tests: a tiny configuration and a
factory wiring pipelines to stage directories under ``tmp_path``.
"""
import pytest

from library.config.config import PipelineConfig
from library.data_acquisition.synthetic_parts import SyntheticPartConfig
from library.gan.training import TrainConfig
from library.synthesis.microcanonical import SynthConfig


@pytest.fixture
def pipeline_config(tmp_path):
    """Parameters small enough that every stage runs in seconds."""
    data_home = tmp_path / "data"
    figures_home = tmp_path / "figures"
    data_home.mkdir()
    figures_home.mkdir()
    yield PipelineConfig(
        data_home,
        figures_home,
        seed=5,
        n_theta=64,
        savgol_window_um=40.0,
        n_bins=4,
        window_dz=16,
        placement_retries=5,
        bank_size=4,
        gan=TrainConfig(batch_size=4, epochs=1, profile="desk"),
        synth=SynthConfig(G=2, iterations=3, J=2, L=2, image_side=16, log_every=1),
        synthetic=SyntheticPartConfig(
            n_parts=2,
            radius_um=60.0,
            length_um=128.0,
            n_theta=64,
            roughness_um=2.0,
            correlation_um=20.0,
            n_pores=40,
            axis_median_um=6.0,
        ),
    )


@pytest.fixture
def make_stage(pipeline_config):
    """Return a factory for pipelines writing to ``data_home/<stage>``."""

    def _make(cls, stage, input_dir=None, no_plots=True, **kwargs):
        paths = {
            "figures_dir": pipeline_config.figures_home / stage,
            "data_dir": pipeline_config.data_home / stage,
            "figures_file_stem": f"{stage}_test",
            "data_file_stem": f"{stage}_test",
        }
        if input_dir is not None:
            paths["input_dir"] = input_dir
        return cls(pipeline_config, paths, 0, no_plots, "png", **kwargs)

    yield _make
