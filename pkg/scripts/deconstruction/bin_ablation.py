import argparse
import sys
from pathlib import Path

root_dir = Path(__file__).parents[2].resolve()
sys.path.insert(0, str(root_dir / "src"))

from library import scriptparse
from pipelines.deconstruction.spatial_fit import BinAblationPipeline


def main(args: argparse.Namespace) -> int:
    """Compare fitted density maps for several bin counts"""
    pipeline_config = scriptparse.startup(
        args,
        "spatial",
        "ablation",
        default_input="deconstruction",
        data_subdirectory="ablation",
    )
    pipeline = BinAblationPipeline(
        **pipeline_config,
        ground_truth_dir=args.truth,
        bin_counts=tuple(args.bin_counts),
    )
    return pipeline.run()


DESCRIPTION = """Study the bin count of the spatial model.

The spatial model is fitted to the deconstructed ground truth for every
given number of bins per axis. Each fitted density map is rasterized on
a fine grid and compared to the generating density law of the synthetic
ground truth through the L1 distance of the normalized rasters. Few
bins smear the radial trend, many bins resolve it but leave bins nearly
empty. Requires synthetic ground truth, as the generating law is read
from its manifest.
"""

if __name__ == "__main__":
    parser = scriptparse.BaseScriptParser(
        prog=f"python {Path(__file__).name}",
        description=DESCRIPTION,
    )
    parser.remove_argument("processes")
    parser.add_argument(
        "-b",
        "--bin-counts",
        help="Numbers of bins per axis to compare.",
        dest="bin_counts",
        type=int,
        nargs="+",
        default=[5, 20, 30, 100],
        metavar="N_B",
    )
    parser.add_argument(
        "--truth",
        help=(
            "Directory of the synthetic ground truth holding the manifest. "
            "Defaults to the ground truth directory under the data home."
        ),
        dest="truth",
        type=Path,
        default=None,
        metavar="DIRECTORY",
    )

    args_ = parser.parse_args()
    sys.exit(scriptparse.run_pipeline(lambda: main(args_)))
