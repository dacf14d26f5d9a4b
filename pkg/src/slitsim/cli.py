"""Command-line entry point: ``sim <command> --config <path> [--key=value ...]``.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 usage or
configuration error, 3 runtime/numeric error.
"""

from __future__ import annotations

import argparse
import sys

from .cml import StabilityError
from .config import ConfigError, load_config
from .core import ValidationError
from .dynamics import NodeSingularityError
from .runner import COMMANDS, run_pipeline


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sim",
        description="Double-slit diffusion-field simulator and verification suite.",
        epilog="Any config key can be overridden with --key=value.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", metavar="PATH", default=None)
    return parser


def main(argv=None) -> int:
    args, extras = _parser().parse_known_args(argv)
    bad = [tok for tok in extras if not (tok.startswith("--") and "=" in tok)]
    if bad:
        print(f"sim: unrecognized arguments: {' '.join(bad)}", file=sys.stderr)
        return 2

    try:
        config = load_config(args.config, extras)
    except (ConfigError, OSError) as exc:
        print(f"sim: config error: {exc}", file=sys.stderr)
        return 2

    try:
        result = run_pipeline(config, args.command)
    except (ValidationError, StabilityError, NodeSingularityError, OSError) as exc:
        print(f"sim: error: {exc}", file=sys.stderr)
        return 3

    for line in result.summary_lines():
        print(line)
    return 0 if result.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
