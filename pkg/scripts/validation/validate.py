import argparse
import sys
from pathlib import Path

root_dir = Path(__file__).parents[2].resolve()
sys.path.insert(0, str(root_dir / "src"))

from library import scriptparse
from pipelines.validation.compare import ValidationPipeline


def main(args: argparse.Namespace) -> int:
    """Compare generated parts with the ground truth"""
    pipeline_config = scriptparse.startup(
        args,
        "validation",
        "comparison",
        default_input=".",
    )
    pipeline = ValidationPipeline(
        **pipeline_config,
        truth_subdir=args.truth,
        generated_subdir=args.generated,
    )
    return pipeline.run()


DESCRIPTION = """Validate generated parts against the ground truth.

The generated parts are deconstructed with the settings of the ground
truth. The script compares the six pore metrics (position x and y,
volume, anisotropy, angle to the z-axis and nearest neighbour
distance) through histograms and two-sample KS distances, all pairs of
metrics through joint histograms and their L1 distance, and the log
scattering coefficients of pore projections and surface maps through
the precision of both ensembles and their separation. Tables, a JSON
summary and figures are saved in the validation directory.
"""

if __name__ == "__main__":
    parser = scriptparse.BaseScriptParser(
        prog=f"python {Path(__file__).name}",
        description=DESCRIPTION,
        requires_parallel=True,
    )
    parser.add_argument(
        "--truth",
        help="Stage directory of the ground truth volumes, under the input.",
        dest="truth",
        default="ground_truth",
        metavar="NAME",
    )
    parser.add_argument(
        "--generated",
        help="Stage directory of the generated parts, under the input.",
        dest="generated",
        default="part",
        metavar="NAME",
    )

    args_ = parser.parse_args()
    sys.exit(scriptparse.run_pipeline(lambda: main(args_)))
