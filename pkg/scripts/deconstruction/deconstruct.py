import argparse
import sys
from pathlib import Path

root_dir = Path(__file__).parents[2].resolve()
sys.path.insert(0, str(root_dir / "src"))

from library import scriptparse
from pipelines.deconstruction.deconstruct import DeconstructPipeline


def main(args: argparse.Namespace) -> int:
    """Deconstruct part volumes into pores and surface maps"""
    pipeline_config = scriptparse.startup(
        args,
        "deconstruction",
        "parts",
        overrides={
            "connectivity": args.connectivity,
            "min_pore_voxels": args.min_voxels,
            "n_theta": args.n_theta,
            "savgol_window_um": args.window,
        },
        default_input="ground_truth",
    )
    pipeline = DeconstructPipeline(**pipeline_config)
    return pipeline.run()


DESCRIPTION = """Deconstruct part volumes into pores and surface maps.

Every part volume in the input directory (by default the synthetic
ground truth) is labeled into connected pores. The script writes one
CSV table of pore metrics per part, the unrolled boundary of every part
before and after Savitzky-Golay smoothing, and one HDF5 archive of all
pores centred in training cubes of the GAN profile side.
"""

if __name__ == "__main__":
    parser = scriptparse.BaseScriptParser(
        prog=f"python {Path(__file__).name}",
        description=DESCRIPTION,
        requires_parallel=True,
    )
    parser.add_argument(
        "--connectivity",
        help="Pore connectivity, 6 or 26. Overrides the config file.",
        dest="connectivity",
        type=int,
        choices=[6, 26],
        default=None,
    )
    parser.add_argument(
        "--min-voxels",
        help="Smallest pore to keep, in voxels. Overrides the config file.",
        dest="min_voxels",
        type=int,
        default=None,
    )
    parser.add_argument(
        "--n-theta",
        help="Angular samples of the unrolled surface maps.",
        dest="n_theta",
        type=int,
        default=None,
    )
    parser.add_argument(
        "-w",
        "--window",
        help="Savitzky-Golay window length in micrometres.",
        dest="window",
        type=float,
        default=None,
    )

    args_ = parser.parse_args()
    sys.exit(scriptparse.run_pipeline(lambda: main(args_)))
