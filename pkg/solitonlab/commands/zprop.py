import argparse

from ..services.experiments import run_charge_transfer_uniformity
from .common import RunContext, emit

name = "zprop"
description = "linear charge-transfer Z-system: Strichartz ratio ρ(ε) across the sweep"


def register(sub: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    p = sub.add_parser(name, parents=[parent], help=description)
    p.set_defaults(handler=run)


def run(args: argparse.Namespace, ctx: RunContext) -> int:
    report = run_charge_transfer_uniformity(ctx.cfg, seed=ctx.seed, threads=ctx.threads)
    rows = [m.model_dump() for m in report.members]
    emit(ctx, "charge_transfer_uniformity", report, rows,
         ["eps", "ratio", "l2t_l6x", "pb_l2t_l6x", "local_decay_v1", "local_decay_v2", "symmetry_defect"])
    print(f"max/min rho = {report.spread:.4g}")
    return 0
