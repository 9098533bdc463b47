"""Command line entry point: ``retinasim run`` and ``retinasim list-scenarios``."""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from .config import SCENARIOS, ConfigError, load_config
from .errors import DomainError

log = logging.getLogger("retinasim")

EXIT_OK, EXIT_RUNTIME, EXIT_INVALID = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="retinasim", description="Retina detector-emergence experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one scenario from a config file")
    run.add_argument("--config", required=True, help="YAML config file")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--out", default=None, help="override the output directory")
    run.add_argument("-v", "--verbose", action="store_true")
    sub.add_parser("list-scenarios", help="print the available scenario names")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list-scenarios":
        for name in SCENARIOS:
            print(name)
        return EXIT_OK

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.out is not None:
            overrides["output_dir"] = args.out
        if overrides:
            cfg = cfg.model_copy(update=overrides)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_INVALID

    from .scenarios import run_scenario

    try:
        art = run_scenario(cfg)
    except DomainError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as err:  # noqa: BLE001 - report and map to the runtime exit code
        log.debug("run failed", exc_info=True)
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME

    for path in art.csv_files:
        log.info("wrote %s", path)
    print(art.output_dir / "summary.txt")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
