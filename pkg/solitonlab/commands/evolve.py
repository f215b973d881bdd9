import argparse

from ..core.errors import ConfigurationError
from ..services.evolver import CheckpointObserver, NLSEvolver, NormObserver
from ..services.experiments import grid_from_config, prepare_ground, open_cache
from ..services.soliton import initial_sigma, make_soliton
from ..storage.checkpoint import read_checkpoint, write_checkpoint
from ..storage.emitters import write_csv
from .common import RunContext, emit

name = "evolve"
description = "raw NLS run from the configured soliton or a checkpoint (--resume)"


def register(sub: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    p = sub.add_parser(name, parents=[parent], help=description)
    p.add_argument("--t-end", type=float, help="final time (default: the scenario horizon)")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace, ctx: RunContext) -> int:
    cfg = ctx.cfg
    sc = cfg.scenario
    eps = cfg.model.eps
    grid = grid_from_config(cfg)
    if ctx.resume is not None:
        ckpt = read_checkpoint(ctx.resume)
        if ckpt.grid != grid or ckpt.kind != 0:
            raise ConfigurationError(f"{ctx.resume} does not hold a scalar field on the configured grid")
        u0, t0 = ckpt.field, ckpt.t
    else:
        ground = prepare_ground(cfg, grid, open_cache(cfg))
        u0, t0 = make_soliton(initial_sigma(cfg.sigma0, eps, grid.dim), ground), 0.0
    t_end = args.t_end if args.t_end is not None else t0 + cfg.horizon_for(eps)

    evolver = NLSEvolver(grid, cfg.model, sc.dt, with_potential=sc.with_potential)
    norms = NormObserver(sc.decompose_stride)
    observers = [norms]
    if sc.checkpoint_stride:
        observers.append(CheckpointObserver(ctx.out_dir / "checkpoints", sc.checkpoint_stride))
    state = evolver.initial_state(u0, t0)
    evolver.run(state, t_end, observers)
    final = write_checkpoint(ctx.out_dir / "evolve_final.nlss", grid, state.t, state.u)

    rows = [{"t": r["t"], "mass": r["mass"], "energy": r["energy"], "linf": r["linf"]} for r in norms.rows]
    if cfg.output.csv:
        write_csv(ctx.out_dir / "evolve_norms.csv", ["t", "mass", "energy", "linf"], rows)
    first, last = rows[0], rows[-1]
    summary = {"t0": t0, "t_end": state.t, "steps": state.step_count,
               "mass_drift": abs(last["mass"] - first["mass"]) / first["mass"],
               "energy_drift": abs(last["energy"] - first["energy"]) / max(abs(first["energy"]), 1e-300)}
    report = {"kind": "evolve", "meta": ctx.meta(grid).model_dump(), "summary": summary, "final_checkpoint": final}
    emit(ctx, "evolve", report, [summary])
    return 0
