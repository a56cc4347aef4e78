# -*- coding: utf-8 -*-
"""Main entry point for 'combo' command.

Arguments that are always handled before the command line parser:
    --verbose <level> - set log level, overrides 'COMBO_LOG'

Commands run one stage of the pipeline and exchange artifacts through the
output directory:
    generate  rasterize analytic geometry into a phase image
    coarsen   merge voxels into boxels with exact volume fractions
    normals   identify interface normals of composite boxels
    solve     solve the periodic cell problem
    post      recover phase fields and export tables and slices
    bench     compare coarse variants against a fine reference

Environment variables:
    - COMBO_LOG - log level name or integer [0-50]
"""

import os
import sys

COMBO_ROOT = os.path.dirname(os.path.abspath(__file__))
common_path = os.path.join(COMBO_ROOT, "common")
if common_path not in sys.path:
    sys.path.insert(0, common_path)

from combo_fft.utils import (  # noqa: E402
    LOG_ENV_KEY,
    parse_log_level,
    configure_logging,
)


def _pop_verbose(argv):
    if "--verbose" not in argv:
        return None
    idx = argv.index("--verbose")
    argv.pop(idx)
    if idx >= len(argv):
        raise RuntimeError(
            "Expect value after \"--verbose\" argument. Expected: notset,"
            " debug, info, warning, error, critical or integer [0-50]."
        )
    return parse_log_level(argv.pop(idx))


def main():
    log_level = _pop_verbose(sys.argv)
    if log_level is not None:
        os.environ[LOG_ENV_KEY] = str(log_level)
    configure_logging()

    from combo_fft.cli import main as cli_main

    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
