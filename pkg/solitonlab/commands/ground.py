import argparse

from ..core.grid import make_grid
from ..services.experiments import open_cache
from ..services.ground_state import mass_curve
from ..services.spectral import embedded_eigenvalue_probe, spectral_probe
from ..storage.cache import ground_state_for
from .common import RunContext, emit, log

name = "ground"
description = "solve (and cache) the ground state, optionally scanning μ and probing the spectrum"


def register(sub: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    p = sub.add_parser(name, parents=[parent], help=description)
    p.add_argument("--mu", type=float, nargs="+", help="frequencies to scan (default: sigma0.mu)")
    p.add_argument("--spectral", action="store_true", help="Lanczos probe of L+, L- and the root space")
    p.add_argument("--embedded", action="store_true", help="inverse-iteration search for embedded eigenvalues")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace, ctx: RunContext) -> int:
    cfg = ctx.cfg
    grid = make_grid(cfg.grid.dim, cfg.grid.points_per_axis, cfg.grid.box_length)
    mus = args.mu or [cfg.sigma0.mu]
    report: dict = {"kind": "ground", "meta": ctx.meta(grid).model_dump()}
    if len(mus) > 1:
        rows = mass_curve(mus, grid, cfg.model, cfg.ground)
        report["mass_curve"] = rows
        emit(ctx, "ground", report, rows, ["mu", "converged", "mass", "convexity", "residual", "error"])
        return 0
    ground = ground_state_for(mus[0], grid, cfg.model, cfg.ground, open_cache(cfg))
    row = {"mu": ground.mu, "mass": ground.mass, "residual": ground.residual, "convexity": ground.convexity,
           "radial_defect": ground.radial_defect}
    report["ground_state"] = row
    if args.spectral:
        report["spectral"] = spectral_probe(ground, seed=ctx.seed).to_dict()
    if args.embedded:
        report["embedded"] = [vars(p) for p in embedded_eigenvalue_probe(ground, seed=ctx.seed)]
    log.info("ground state mu=%.6g ready", ground.mu)
    emit(ctx, "ground", report, [row])
    return 0


__all__ = ["register", "run"]
