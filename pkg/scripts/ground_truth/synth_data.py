import argparse
import sys
from pathlib import Path

root_dir = Path(__file__).parents[2].resolve()
sys.path.insert(0, str(root_dir / "src"))

from library import scriptparse
from pipelines.ground_truth.synthetic_data import SyntheticDataPipeline


def main(args: argparse.Namespace) -> int:
    """Generate synthetic ground truth parts"""
    pipeline_config = scriptparse.startup(
        args,
        "ground_truth",
        "synthetic",
        overrides={
            "synthetic.n_parts": args.n_parts,
            "synthetic.n_pores": args.n_pores,
            "synthetic.density_gradient": args.gradient,
        },
    )
    pipeline = SyntheticDataPipeline(**pipeline_config)
    return pipeline.run()


DESCRIPTION = """Generate synthetic ground truth parts.

Script generates cylindrical parts with a band-limited rough boundary,
filled with randomly oriented ellipsoidal pores whose centres follow
the radial density law 1 + g r / R. The parts stand in for CT scans of
printed parts. Volumes, boundary maps and a manifest of the true
generating parameters are written to the ground truth directory under
the data home; the manifest is used by the bin ablation to compare
fitted density maps against the generating law.
"""

if __name__ == "__main__":
    parser = scriptparse.BaseScriptParser(
        prog=f"python {Path(__file__).name}",
        description=DESCRIPTION,
        requires_parallel=True,
        requires_seed=True,
        with_input=False,
    )
    parser.add_argument(
        "-n",
        "--n-parts",
        help="Number of parts to generate. Overrides the config file.",
        dest="n_parts",
        type=int,
        default=None,
    )
    parser.add_argument(
        "--n-pores",
        help="Number of pores requested per part. Overrides the config file.",
        dest="n_pores",
        type=int,
        default=None,
    )
    parser.add_argument(
        "-g",
        "--gradient",
        help=(
            "Gradient g of the radial pore density 1 + g r / R. Overrides "
            "the config file."
        ),
        dest="gradient",
        type=float,
        default=None,
    )

    args_ = parser.parse_args()
    sys.exit(scriptparse.run_pipeline(lambda: main(args_)))
