import argparse
import sys
from pathlib import Path

root_dir = Path(__file__).parents[2].resolve()
sys.path.insert(0, str(root_dir / "src"))

from library import scriptparse
from pipelines.generation.surface import SurfaceSynthesisPipeline


def main(args: argparse.Namespace) -> int:
    """Synthesize surface roughness maps"""
    pipeline_config = scriptparse.startup(
        args,
        "surface",
        args.statistic or "configured",
        overrides={
            "synth.iterations": args.iterations,
            "synth.G": args.ensemble_size,
            "synth.image_side": args.image_side,
            "synth.statistic": args.statistic,
        },
        default_input="deconstruction",
    )
    pipeline = SurfaceSynthesisPipeline(**pipeline_config)
    return pipeline.run()


DESCRIPTION = """Synthesize new surface roughness maps.

Every smoothed boundary map of the deconstruction serves as target of
a microcanonical synthesis: starting from white noise, the map is
updated by gradient descent until the second moments of its log
scattering coefficients across an ensemble of circular translations
match those of the target. The result is smoothed like the measured
maps. Loss traces, rose plots of the first-order coefficients and a
comparison of all coefficients against the target band are saved too.
"""

if __name__ == "__main__":
    parser = scriptparse.BaseScriptParser(
        prog=f"python {Path(__file__).name}",
        description=DESCRIPTION,
        requires_seed=True,
    )
    parser.remove_argument("processes")
    parser.add_argument(
        "-i",
        "--iterations",
        help="Maximum number of descent iterations.",
        dest="iterations",
        type=int,
        default=None,
    )
    parser.add_argument(
        "-G",
        "--ensemble-size",
        help="Number of translations in the ensemble.",
        dest="ensemble_size",
        type=int,
        default=None,
    )
    parser.add_argument(
        "--image-side",
        help="Working resolution of the synthesis, a power of two.",
        dest="image_side",
        type=int,
        default=None,
    )
    parser.add_argument(
        "--statistic",
        help=(
            "Ensemble statistic to match: the augmented second moments "
            "or the centred covariance."
        ),
        dest="statistic",
        choices=["moments", "covariance"],
        default=None,
    )

    args_ = parser.parse_args()
    sys.exit(scriptparse.run_pipeline(lambda: main(args_)))
