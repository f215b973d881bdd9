import argparse

from ..services.experiments import run_finite_time
from ..storage.emitters import write_csv
from .common import RunContext, emit

name = "interact"
description = "finite-time soliton-potential interaction and the ε-scaling of the radiation"

COLUMNS = ["eps", "horizon", "r_h1_final", "max_position_deviation", "mass_drift", "status"]


def register(sub: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    p = sub.add_parser(name, parents=[parent], help=description)
    p.set_defaults(handler=run)


def run(args: argparse.Namespace, ctx: RunContext) -> int:
    report = run_finite_time(ctx.cfg, out_dir=ctx.out_dir, seed=ctx.seed, threads=ctx.threads)
    rows = [m.model_dump() for m in report.members]
    if ctx.cfg.output.csv:
        write_csv(ctx.out_dir / "finite_time_summary.csv", COLUMNS, rows)
    emit(ctx, "finite_time", report, rows, COLUMNS)
    if report.fit is not None:
        print(f"slope {report.fit.slope:.4f} ± {report.fit.half_width:.4f} (expected {report.fit.expected})")
    return 0
