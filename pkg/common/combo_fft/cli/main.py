import os
import sys
import json
import argparse
import logging
from typing import List, Optional

from combo_fft.exceptions import ComboError

from .bench import cmd_bench
from .commands import (
    cmd_generate,
    cmd_coarsen,
    cmd_normals,
    cmd_solve,
    cmd_post,
)
from .config import RunConfig, load_run_config, store_run_config
from .console import echo
from .exceptions import ArgValueError

PROG = "combo"
CONFIG_ECHO_FILE = "config.json"
ERROR_FILE = "error.json"

COMMANDS = (
    ("generate", cmd_generate, "Rasterize analytic geometry into an image"),
    ("coarsen", cmd_coarsen, "Coarsen image into boxels"),
    ("normals", cmd_normals, "Identify normals of composite boxels"),
    ("solve", cmd_solve, "Solve the cell problem"),
    ("post", cmd_post, "Recover phase fields and export results"),
    ("bench", cmd_bench, "Compare coarse variants against fine reference"),
)

log = logging.getLogger(__name__)


class CustomHelpOrder(argparse.HelpFormatter):
    def __init__(
        self,
        prog,
        indent_increment=2,
        max_help_position=42,
        width=None
    ):
        super(CustomHelpOrder, self).__init__(
            prog, indent_increment, max_help_position, width
        )


def _add_common_arguments(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--config",
        default=None,
        help="Path to JSON run configuration",
    )
    parser.add_argument(
        "--out",
        default=None,
        help="Output directory (default 'combo_out')",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="Threads of the Fourier transforms",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Seed of random geometries",
    )
    parser.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override config value, dotted keys and JSON values",
    )


def build_parser() -> argparse.ArgumentParser:
    main_parser = argparse.ArgumentParser(
        prog=PROG,
        description="FFT homogenization with composite boxels",
        formatter_class=CustomHelpOrder,
    )
    subparsers = main_parser.add_subparsers(
        title="Commands",
        description="Valid commands",
        help="Command to run",
        required=True,
    )
    for name, func, help_text in COMMANDS:
        parser = subparsers.add_parser(
            name, help=help_text, formatter_class=CustomHelpOrder
        )
        parser.set_defaults(func=func)
        parser.set_defaults(func_name=name)
        _add_common_arguments(parser)
        if name == "bench":
            parser.add_argument(
                "--suite",
                default=None,
                help="Benchmark suite, e.g. 'sphere-desk'",
            )
    return main_parser


def _usage_lines(func_name: str) -> List[str]:
    return [
        f"Usage: {PROG} {func_name} [OPTIONS]",
        f"Try '{PROG} {func_name} --help' for help.",
    ]


def _store_error(out_dir: str, exc: Exception, func_name: str):
    data = {
        "error": exc.__class__.__name__,
        "message": str(exc),
        "command": func_name,
    }
    try:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, ERROR_FILE), "w") as stream:
            json.dump(data, stream, indent=4, sort_keys=True)
    except OSError:
        log.warning(f"Failed to write '{ERROR_FILE}' to '{out_dir}'")


def main(argv: Optional[List[str]] = None) -> int:
    """Run one pipeline command.

    Args:
        argv (Optional[List[str]]): Arguments without program name,
            'sys.argv' is used when not passed.

    Returns:
        int: Exit code, 0 on success.
    """
    if argv is None:
        argv = sys.argv[1:]
    result = build_parser().parse_args(argv)
    func = result.func
    func_name = result.func_name

    overrides = list(result.override)
    if getattr(result, "suite", None):
        overrides.append(f"bench.suite={result.suite}")

    out_dir = result.out or RunConfig().out
    try:
        config = load_run_config(
            result.config,
            overrides,
            out=result.out,
            threads=result.threads,
            seed=result.seed,
        )
        out_dir = config.out
        store_run_config(config, config.path(CONFIG_ECHO_FILE))
        log.debug(f"Running '{func_name}' into '{out_dir}'")
        func(config)

    except ArgValueError as exc:
        param_hint_str = ""
        if exc.param_hint:
            param_hint_str = f" for {exc.param_hint}"
        error_msg = f"Error: Invalid value{param_hint_str}: {exc.message}"
        print("\n".join(_usage_lines(func_name) + ["", error_msg]))
        return 1

    except ComboError as exc:
        log.debug("Command failed", exc_info=True)
        for line in _usage_lines(func_name):
            echo(line)
        echo("")
        echo(f"!!! {exc}")
        _store_error(out_dir, exc, func_name)
        return 1

    return 0
