#!/usr/bin/env python3
import sys
from pathlib import Path

import yaml

root_dir = Path(__file__).parent.resolve()
sys.path.insert(0, str(root_dir / "src"))

from library.config.config import default_config_text  # noqa: E402


def install():
    """
    Install the project by creating a config file and the data and
    figure directories.
    """
    config_file = root_dir / "config.yaml"
    if not config_file.exists():
        create_config_file(config_file)
    create_dirs(config_file)


def create_config_file(config_file: Path):
    """
    Write a config.yaml with every pipeline parameter at its default.

    :param config_file: Destination of the config file.
    """
    with open(config_file, "w") as file:
        file.write(default_config_text())
    print("Created a default config file.")


def create_dirs(config_file: Path):
    """
    Create the data and figure homes named in the config file.

    :param config_file: The config file to read the homes from.
    """
    with open(config_file, "r") as file:
        content = yaml.safe_load(file) or {}
    paths = content.get("paths", {})
    data_home = paths.get("data_home")
    figures_home = paths.get("figures_home")
    if not all([data_home, figures_home]):
        print("Could not parse config file, not all paths were found!")
        sys.exit(1)

    homes = []
    for value, default in [(data_home, "data"), (figures_home, "figures")]:
        if value == "default":
            homes.append(root_dir / default)
        else:
            homes.append(Path(value).resolve())

    for directory in homes:
        if not directory.exists():
            print(f"Creating missing directory: {str(directory)}")
            directory.mkdir(parents=True)


if __name__ == "__main__":
    install()
