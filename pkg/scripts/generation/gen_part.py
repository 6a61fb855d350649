import argparse
import sys
from pathlib import Path

root_dir = Path(__file__).parents[2].resolve()
sys.path.insert(0, str(root_dir / "src"))

from library import scriptparse
from pipelines.generation.part import AssemblePartPipeline


def main(args: argparse.Namespace) -> int:
    """Assemble synthetic part realizations"""
    type_flag = "whole" if args.whole else "windowed"
    pipeline_config = scriptparse.startup(
        args,
        "part",
        type_flag,
        overrides={
            "window_dz": args.window_dz,
            "placement_retries": args.retries,
        },
        default_input=".",
    )
    pipeline = AssemblePartPipeline(
        **pipeline_config,
        windowed=not args.whole,
    )
    return pipeline.run()


DESCRIPTION = """Assemble synthetic parts from the generative models.

For every synthesized surface map, a part is assembled: pore
specifications are sampled from the spatial model, matched to the most
similar pore of the bank and placed without merging with neighbours.
The part is traversed along its axis with a moving window of length
dz that advances by dz/2; pores bisected by the end of a window are
carried over to the next one. Finally, the part is clipped to the
boundary rolled up from the surface map. The input is the data home;
the model, the bank and the maps are read from their stage directories.
"""

if __name__ == "__main__":
    parser = scriptparse.BaseScriptParser(
        prog=f"python {Path(__file__).name}",
        description=DESCRIPTION,
        requires_seed=True,
    )
    parser.remove_argument("processes")
    parser.add_argument(
        "--window-dz",
        help="Length of the moving window in voxels. Overrides the config file.",
        dest="window_dz",
        type=int,
        default=None,
    )
    parser.add_argument(
        "--retries",
        help="Relocations of a pore before it is skipped.",
        dest="retries",
        type=int,
        default=None,
    )
    parser.add_argument(
        "--whole",
        help="Assemble the whole part at once instead of window by window.",
        dest="whole",
        action="store_true",
    )

    args_ = parser.parse_args()
    sys.exit(scriptparse.run_pipeline(lambda: main(args_)))
