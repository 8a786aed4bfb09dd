"""CLI Main Entry Point"""

import logging

from src.config import load_config
from src.core import FusionError
from src.output import print_error

from src.cli.args import parse_args
from src.cli.commands import (
    display_config,
    run_embed_audio,
    run_eval,
    run_fuse,
    run_gen,
    run_install_completion,
    run_pipeline,
    run_predict,
    run_train,
)
from src.cli.utils import apply_overrides, configure_logging

logger = logging.getLogger(__name__)

COMMANDS = {
    "gen": run_gen,
    "embed-audio": run_embed_audio,
    "train": run_train,
    "predict": run_predict,
    "fuse": run_fuse,
    "eval": run_eval,
    "pipeline": run_pipeline,
}


def main(argv: list[str] | None = None) -> int:
    """Main entry point for the CLI.

    Returns 0 on success and 1 on any data or file error; argparse exits
    with 2 on usage errors.
    """
    args = parse_args(argv)
    configure_logging(args.verbose)

    if args.command == "completion":
        return run_install_completion()

    try:
        config = apply_overrides(load_config(args.config), args)
        if args.command == "config":
            return display_config(config)
        return COMMANDS[args.command](args, config)
    except FusionError as e:
        logger.debug("command %s failed", args.command, exc_info=True)
        print_error(f"{type(e).__name__}: {e}")
        return 1
    except OSError as e:
        logger.debug("command %s failed", args.command, exc_info=True)
        print_error(str(e))
        return 1
