import argparse
import sys
from pathlib import Path

root_dir = Path(__file__).parents[2].resolve()
sys.path.insert(0, str(root_dir / "src"))

from library import scriptparse
from pipelines.deconstruction.spatial_fit import FitSpatialModelPipeline


def main(args: argparse.Namespace) -> int:
    """Fit the spatial pore model"""
    pipeline_config = scriptparse.startup(
        args,
        "spatial",
        "model",
        overrides={"n_bins": args.n_bins},
        default_input="deconstruction",
    )
    pipeline = FitSpatialModelPipeline(**pipeline_config)
    return pipeline.run()


DESCRIPTION = """Fit the binned spatial model of pore locations and properties.

The pores of all deconstructed parts are pooled and assigned to a grid
of N_b x N_b bins over the part cross-section. Per bin, the script
records the pore rate per unit length and the empirical distributions
of pore volume, anisotropy and orientation. The model is saved as JSON
in the spatial directory under the data home, together with a map of
the fitted pore density.
"""

if __name__ == "__main__":
    parser = scriptparse.BaseScriptParser(
        prog=f"python {Path(__file__).name}",
        description=DESCRIPTION,
    )
    parser.remove_argument("processes")
    parser.add_argument(
        "--n-bins",
        help="Bins per cross-section axis. Overrides the config file.",
        dest="n_bins",
        type=int,
        default=None,
    )

    args_ = parser.parse_args()
    sys.exit(scriptparse.run_pipeline(lambda: main(args_)))
