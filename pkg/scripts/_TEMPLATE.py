import argparse
import sys
from pathlib import Path

root_dir = Path(__file__).parents[2].resolve()
sys.path.insert(0, str(root_dir / "src"))

from library import scriptparse

# from pipelines.>>STAGE.MODULE import >>Pipeline


def main(args: argparse.Namespace) -> int:
    """>>DESCRIPTION"""
    pipeline_config = scriptparse.startup(
        args,
        ">>MILESTONE",
        ">>TYPE_FLAG",
        overrides={},  # >>dotted config keys set from args
        default_input=None,  # >>stage directory read by the pipeline
    )

    pipeline = None  # >>FILL IN: Pipeline(**pipeline_config, ...)
    return pipeline.run()


DESCRIPTION = """>>DESCRIPTION OF SCRIPT PURPOSE
"""

if __name__ == "__main__":
    parser = scriptparse.BaseScriptParser(
        prog=f"python {Path(__file__).name}",
        description=DESCRIPTION,
        requires_seed=False,  # >>True for generation commands
    )
    # >>remove unnecessary args

    # >>add new args

    args_ = parser.parse_args()
    sys.exit(scriptparse.run_pipeline(lambda: main(args_)))
