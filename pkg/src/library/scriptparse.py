"""Parser base class for scripts"""
from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any, Callable, Mapping, TypeAlias

import typedef
from library.config import config, logging_config
from library.exceptions import InvalidConfigPathError, PorosynthError

if TYPE_CHECKING:
    from pipelines.base import Pipeline

# type def
PipelineKwargs: TypeAlias = dict[str, bool | str | int | config.PipelineConfig]


class BaseScriptParser(argparse.ArgumentParser):

    def __init__(
        self,
        prog=None,
        usage=None,
        description=None,
        epilog=None,
        requires_parallel=False,
        requires_seed=False,
        with_input=True,
    ):
        """
        :param prog: Command to execute the program.
        :param usage: Usage description.
        :param description: Description of what the program does.
        :param epilog: Epilog to print after usage.
        :param requires_parallel: If True, the description will include
            a note that the script profits from parallel execution.
        :param requires_seed: If True, the description will include a
            note that the command needs an explicit seed.
        :param with_input: Whether the script reads the output of an
            earlier stage and therefore accepts ``--input``.
        """
        description = description or ""
        if requires_parallel:
            description += (
                "This script is CPU resource-intensive and should be "
                "executed in parallel using the `-p` argument. "
            )
        if requires_seed:
            description += (
                "This is a generation command: it requires an explicit "
                "seed, given with `--seed` or in the config file. "
            )
        super().__init__(
            prog=prog,
            usage=usage,
            description=description,
            epilog=epilog,
        )
        self.add_argument(
            "--config",
            help=(
                "Path of an alternative config file (YAML or JSON). "
                "Defaults to config.yaml at the project root."
            ),
            dest="config_file",
            default=None,
            metavar="FILE",
        )
        self.add_argument(
            "--seed",
            help="Base seed of all random draws of the command.",
            dest="seed",
            type=int,
            default=None,
        )
        self.add_argument(
            "-p",
            "--processes",
            help=(
                "Use multiprocessing, with the specified number of processes. "
                "The number is capped by the POROSYNTH_THREADS environment "
                "variable."
            ),
            type=int,
            default=0,
            dest="processes",
            metavar="NUMBER",
        )
        self.add_argument(
            "-x",
            "--no-plots",
            help=(
                "Suppresses creation of plots. Useful to prevent overwriting "
                "of existing figure files."
            ),
            dest="no_plots",
            action="store_true",
        )
        self.add_argument(
            "--ext",
            help="File extension for the plot files. Defaults to png.",
            dest="fig_ext",
            type=str,
            default="png",
            choices=["pdf", "png"]
        )
        exclusion_group = self.add_mutually_exclusive_group(required=False)
        exclusion_group.add_argument(
            "-v",
            help=(
                "Make the output more verbose. Stackable. Setting -v means "
                "log level DIAGNOSTIC (memory and timing), -vv means "
                "per-iteration progress is logged, and -vvv means log level "
                "DEBUG."
            ),
            dest="verbosity",
            action="count",
            default=0,
        )
        exclusion_group.add_argument(
            "-q",
            help=(
                "Reduce the verbosity of the script. Stackable. Setting -q "
                "means log level WARNING, -qq means log level ERROR, and "
                "-qqq means log level CRITICAL."
            ),
            dest="quiet",
            action="count",
            default=0,
        )
        self.add_argument(
            "--figures-dir",
            help=(
                "The directory path under which to save the figures, if "
                "created. It is recommended to leave this at the default value."
            ),
            dest="figurespath",
            default=None,
            metavar="DIRECTORY",
        )
        self.add_argument(
            "--data-dir",
            help=(
                "The directory path under which to save the artifacts of "
                "the command. It is recommended to leave this at the default "
                "value."
            ),
            dest="datapath",
            default=None,
            metavar="DIRECTORY",
        )
        if with_input:
            self.add_argument(
                "--input",
                help=(
                    "Directory holding the output of the previous stage. "
                    "Defaults to the stage directory under the data home."
                ),
                dest="inputpath",
                default=None,
                metavar="DIRECTORY",
            )

    def remove_argument(self, arg):
        """
        Remove argument from the parser.

        .. note:: The argument can still be parsed, i.e. using it will
            not raise a SystemExit, but will quietly add the argument
            to the namespace anyway. The main point is that the
            argument does not appear in the help and usage texts.

        :param arg: The name of the argument, without leading dashes.
            For arguments with multiple names, use the destination name.
        :return: None
        """
        for action in self._actions:
            opts = action.option_strings
            if (opts and opts[0] == arg) or action.dest == arg:
                self._remove_action(action)
                break

        for action in self._action_groups:
            for group_action in action._group_actions:
                opts = group_action.option_strings
                if (opts and opts[0] == arg) or group_action.dest == arg:
                    action._group_actions.remove(group_action)
                    return


def startup(
    namespace: argparse.Namespace,
    milestone: str,
    type_flag: str,
    overrides: Mapping[str, Any] | None = None,
    default_input: str | Path | None = None,
    figures_subdirectory: str | Path | None = None,
    data_subdirectory: str | Path | None = None,
) -> PipelineKwargs:
    """
    Common set-up for scripts.

    Function sets up logging according to the received verbosity, loads
    the pipeline configuration with the overrides given on the command
    line and creates a base kwargs dictionary for pipelines, to be
    amended by script-specific keyword arguments. The config hash and
    the profile flag are logged.

    :param namespace: The namespace returned by the parser. Can be
        given as-is, and will not be altered.
    :param milestone: The name of the milestone. Example: ``generation``.
    :param type_flag: The type flag to be inserted after the milestone.
    :param overrides: Dotted-key overrides of pipeline config entries,
        e.g. ``{"n_bins": 30}``. Entries with value None are ignored.
    :param default_input: Input directory relative to the data home,
        used when ``--input`` is not given. If None, the paths will not
        contain an input directory.
    :param figures_subdirectory: An optional subdirectory inside the
        milestone figures directory.
    :param data_subdirectory: An optional subdirectory inside the
        milestone data directory.
    :raises PorosynthError: If the configuration is invalid.
    :return: A dictionary of keyword arguments suitable to start up a
        base :class:`~pipelines.base.Pipeline`.
    """
    log_level = parse_verbosity(namespace)
    logging_config.configure(log_level)

    all_overrides = {"seed": getattr(namespace, "seed", None)}
    all_overrides.update(overrides or {})
    cfg = config.get_pipeline_config(
        getattr(namespace, "config_file", None), all_overrides
    )
    logging.info(
        f"Running {milestone} ({type_flag}) with config {cfg.config_hash}, "
        f"profile {cfg.profile}."
    )
    return parse_namespace(
        namespace,
        cfg,
        milestone,
        type_flag,
        default_input,
        figures_subdirectory,
        data_subdirectory,
    )


def parse_verbosity(namespace: argparse.Namespace) -> int:
    """
    Translate the verbosity information into a log level.

    :param namespace: The script parser namespace.
    :return: The logging level determined from the verbosity args.
    """
    if namespace.verbosity >= 3:
        return 10
    elif namespace.verbosity == 2:
        return logging_config.PROGRESS
    elif namespace.verbosity == 1:
        return logging_config.DIAGNOSTIC
    elif namespace.quiet == 1:
        return 30
    elif namespace.quiet == 2:
        return 40
    elif namespace.quiet >= 3:
        return 50
    else:
        return 20


def parse_namespace(
    namespace: argparse.Namespace,
    cfg: config.PipelineConfig,
    milestone: str,
    type_flag: str,
    default_input: str | Path | None = None,
    figures_subdirectory: str | Path | None = None,
    data_subdirectory: str | Path | None = None,
) -> PipelineKwargs:
    """
    Parse the namespace of a script base parser for base arguments.

    Return a dictionary with keys 'config', 'paths', 'processes',
    'no_plots' and 'fig_ext'. Where the namespace did not supply values,
    defaults are applied.

    :param namespace: The namespace returned by the parser.
    :param cfg: The loaded pipeline configuration.
    :param milestone: The name of the milestone.
    :param type_flag: The type flag to be inserted after the milestone.
    :param default_input: Input directory relative to the data home.
    :param figures_subdirectory: Optional figures subdirectory.
    :param data_subdirectory: Optional data subdirectory.
    :raises InvalidConfigPathError: If the input directory is missing.
    :return: Keyword arguments of a base pipeline.
    """
    paths = _assemble_path_dict(
        milestone,
        cfg,
        type_flag,
        getattr(namespace, "figurespath", None),
        getattr(namespace, "datapath", None),
        figures_subdirectory,
        data_subdirectory,
    )
    input_path = getattr(namespace, "inputpath", None)
    if input_path is not None or default_input is not None:
        if input_path is not None:
            input_dir = Path(input_path)
        else:
            input_dir = cfg.data_home / default_input
        if not input_dir.is_dir():
            raise InvalidConfigPathError(input_dir)
        paths["input_dir"] = input_dir.resolve()

    kwargs = {"config": cfg, "paths": paths}
    defaults = {"processes": 0, "no_plots": False, "fig_ext": "png"}
    for field, default_value in defaults.items():
        if not hasattr(namespace, field):
            logging.debug(
                f"Filling missing argument '{field}' with default value "
                f"{default_value}."
            )
            kwargs.update({field: default_value})
        else:
            kwargs.update({field: getattr(namespace, field)})
    kwargs["processes"] = cfg.clamp_processes(kwargs["processes"])
    return kwargs


def _assemble_path_dict(
    milestone: str,
    cfg: config.PipelineConfig,
    type_flag: str,
    alt_figure_dir: str | Path | None = None,
    alt_data_dir: str | Path | None = None,
    figures_subdirectory: str | Path | None = None,
    data_subdirectory: str | Path | None = None,
) -> typedef.FileDict:
    """
    Assemble a valid file dictionary from the given input.

    The files will have the common file pattern::

        {milestone}_{type_flag}_{ident_flag}.{file_extension}

    where the file extension and possible identification flags are added
    by the pipeline. Alternative directories that do not exist are
    replaced by the default directories with a warning.

    :param milestone: The name of the milestone. Example: ``validation``.
    :param cfg: The pipeline configuration.
    :param type_flag: The type flag to be inserted after the milestone.
    :param alt_figure_dir: Alternative home directory for figures.
    :param alt_data_dir: Alternative home directory for data.
    :param figures_subdirectory: An optional subdirectory inside the
        figures home where to save figures.
    :param data_subdirectory: An optional subdirectory inside the
        data home where to save data files.
    :return: A valid file path dictionary.
    """
    figure_path = cfg.figures_home / milestone
    data_path = cfg.data_home / milestone
    file_stem = f"{milestone}_{type_flag}"

    if figures_subdirectory:
        figure_path = figure_path / Path(figures_subdirectory)

    if alt_figure_dir:
        new_path = Path(alt_figure_dir)
        if new_path.exists() and new_path.is_dir():
            figure_path = new_path
        else:
            logging.warning(
                f"Given figures path is invalid: {str(new_path)}. "
                f"Using fallback path {str(figure_path)} instead."
            )

    if data_subdirectory:
        data_path = data_path / Path(data_subdirectory)

    if alt_data_dir:
        new_path = Path(alt_data_dir)
        if new_path.exists() and new_path.is_dir():
            data_path = new_path
        else:
            logging.warning(
                f"Given data path is invalid: {str(new_path)}. "
                f"Attempting fallback path {str(data_path)} instead."
            )
    return {
        "figures_dir": figure_path.resolve(),
        "data_dir": data_path.resolve(),
        "figures_file_stem": file_stem,
        "data_file_stem": file_stem,
    }


def run_pipeline(task: Pipeline | Callable[[], int]) -> int:
    """
    Execute a pipeline and translate errors into exit codes.

    :param task: A pipeline, or a callable that builds and runs one and
        returns its status code. The callable form lets configuration
        errors raised while setting up the pipeline be reported too.
    :return: The exit code: the status of the pipeline, the exit code of
        a :class:`~library.exceptions.PorosynthError`, or 1 on interrupt.
    """
    runner = task.run if hasattr(task, "run") else task
    try:
        return runner()
    except PorosynthError as exc:
        logging.fatal(f"{type(exc).__name__}: {exc}")
        return exc.exit_code
    except KeyboardInterrupt:
        logging.fatal(
            "Execution forcefully stopped. Some subprocesses might still be "
            "running and need to be killed manually if multiprocessing was "
            "used."
        )
        return 1
