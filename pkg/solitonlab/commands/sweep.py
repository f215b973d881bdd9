import argparse

from ..schemas.reports import SweepReport
from ..services.experiments import SCENARIOS, grid_from_config, run_sweep
from .common import RunContext, emit

name = "sweep"
description = "run a scenario over the ε sweep on sweep.jobs worker processes"


def register(sub: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    p = sub.add_parser(name, parents=[parent], help=description)
    p.add_argument("--scenario", choices=SCENARIOS, default="interact")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace, ctx: RunContext) -> int:
    reports = run_sweep(ctx.cfg, args.scenario, out_dir=ctx.out_dir, seed=ctx.seed, threads=ctx.threads)
    report = SweepReport(meta=ctx.meta(grid_from_config(ctx.cfg)), scenario=args.scenario, reports=reports)
    rows = []
    for r in reports:
        for m in r.get("members", [r]):
            rows.append({k: m.get(k) for k in ("eps", "ratio", "r_h1_final", "sigma_dot_l1", "status") if k in m})
    emit(ctx, f"sweep_{args.scenario}", report, rows)
    return 0
