import argparse

from ..core.errors import AcceptanceFailure
from ..core.grid import make_grid
from ..services.verify import verify_report
from .common import RunContext, emit

name = "verify"
description = "run the invariant suites; exit code 3 when a check misses its tolerance"


def register(sub: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    p = sub.add_parser(name, parents=[parent], help=description)
    p.set_defaults(handler=run)


def run(args: argparse.Namespace, ctx: RunContext) -> int:
    vs = ctx.cfg.verify
    grid = make_grid(vs.dim, vs.points_per_axis, vs.box_length)
    report = verify_report(ctx.cfg, ctx.meta(grid), seed=ctx.seed)
    emit(ctx, "verify", report, [c.model_dump() for c in report.checks],
         ["name", "value", "tolerance", "passed", "detail"])
    if report.failed:
        raise AcceptanceFailure(report.failed)
    return 0
