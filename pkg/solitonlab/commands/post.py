import argparse

from ..services.experiments import run_post_interaction
from .common import RunContext, emit

name = "post"
description = "post-interaction asymptotics: σ̇ plateau and the scattering-profile convergence metric"


def register(sub: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    p = sub.add_parser(name, parents=[parent], help=description)
    p.add_argument("--eps", type=float, help="ε of the run (default: first sweep value or model.eps)")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace, ctx: RunContext) -> int:
    report = run_post_interaction(ctx.cfg, eps=args.eps, out_dir=ctx.out_dir, seed=ctx.seed,
                                  threads=ctx.threads, resume=ctx.resume)
    rows = [s.model_dump() for s in report.samples]
    emit(ctx, f"post_interaction_eps{report.eps:g}", report, rows,
         ["t", "metric", "sigma_dot_l1", "r_linf_h1", "r_l2_w16"])
    if report.contaminated:
        print(f"warning: radiation wrapped around the box at t = {report.first_wrap_time:.6g}")
    return 0
