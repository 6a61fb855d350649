import argparse
import sys
from pathlib import Path

root_dir = Path(__file__).parents[2].resolve()
sys.path.insert(0, str(root_dir / "src"))

from library import scriptparse
from pipelines.generation.pore_gan import TrainPoreGANPipeline


def main(args: argparse.Namespace) -> int:
    """Train the pore GAN and fill the pore bank"""
    pipeline_config = scriptparse.startup(
        args,
        "gan",
        args.profile or "configured",
        overrides={
            "gan.profile": args.profile,
            "gan.epochs": args.epochs,
            "gan.batch_size": args.batch_size,
            "bank_size": args.bank_size,
        },
        default_input="deconstruction",
    )
    pipeline = TrainPoreGANPipeline(**pipeline_config)
    return pipeline.run()


DESCRIPTION = """Train the 3D pore GAN and generate a bank of pores.

The generator and discriminator are trained on the centred pore cubes
archived by the deconstruction. The desk profile works on 16^3 cubes
with all channel counts divided by eight and trains on a CPU in
minutes; the full profile works on 64^3 cubes. After training, latent
vectors are drawn until the requested number of generated pores passes
the plausibility filter built from the ground truth metrics. Network
checkpoints, the bank and loss curves are saved.
"""

if __name__ == "__main__":
    parser = scriptparse.BaseScriptParser(
        prog=f"python {Path(__file__).name}",
        description=DESCRIPTION,
        requires_parallel=True,
        requires_seed=True,
    )
    parser.add_argument(
        "--profile",
        help="Network profile. Overrides the config file.",
        dest="profile",
        choices=["desk", "full"],
        default=None,
    )
    parser.add_argument(
        "-e",
        "--epochs",
        help="Number of training epochs. Overrides the config file.",
        dest="epochs",
        type=int,
        default=None,
    )
    parser.add_argument(
        "--batch-size",
        help="Cubes per training batch. Overrides the config file.",
        dest="batch_size",
        type=int,
        default=None,
    )
    parser.add_argument(
        "-n",
        "--bank-size",
        help="Number of pores in the bank. Overrides the config file.",
        dest="bank_size",
        type=int,
        default=None,
    )

    args_ = parser.parse_args()
    sys.exit(scriptparse.run_pipeline(lambda: main(args_)))
