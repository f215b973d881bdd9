import argparse
import sys
from typing import Optional, Sequence

import scipy.fft
from pydantic import ValidationError

from . import __version__
from .commands import evolve, ground, interact, post, sweep, verify, zprop
from .commands.common import RunContext
from .core.config import settings
from .core.errors import AcceptanceFailure, ConfigurationError, SolitonLabError
from .core.logging import logger, setup_logging
from .schemas.run_config import load_run_config

log = logger.getChild("main")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_ACCEPTANCE = 3

COMMANDS = (ground, evolve, interact, post, zprop, sweep, verify)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="run file (*.cfg)")
    common.add_argument("--out", metavar="DIR", help="output directory (default: output.directory)")
    common.add_argument("--threads", type=int, default=settings.FFT_WORKERS, metavar="N", help="FFT worker threads")
    common.add_argument("--seed", type=int, default=settings.DEFAULT_SEED, metavar="N")
    common.add_argument("--resume", metavar="CHECKPOINT", help="start from an NLSS checkpoint")
    common.add_argument("--log-level", default=settings.LOG_LEVEL)

    parser = argparse.ArgumentParser(prog=settings.APP_NAME, description="NLS soliton-potential interaction toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for command in COMMANDS:
        command.register(sub, common)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        setup_logging(args.log_level)
        if args.threads < 1:
            raise ConfigurationError(f"--threads must be >= 1, got {args.threads}")
        cfg = load_run_config(args.config)
        ctx = RunContext.from_args(args, cfg)
    except (ConfigurationError, ValidationError, ValueError) as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_VALIDATION
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_RUNTIME

    log.info("%s: config hash %s", args.command, cfg.config_hash()[:12])
    try:
        with scipy.fft.set_workers(args.threads):
            return args.handler(args, ctx)
    except AcceptanceFailure as exc:
        log.error("%s", exc)
        return EXIT_ACCEPTANCE
    except (ConfigurationError, ValidationError) as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_VALIDATION
    except (SolitonLabError, OSError) as exc:
        log.error("%s failed: %s: %s", args.command, type(exc).__name__, exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
