"""Shared plumbing of the sub-commands: run context, output directory, report emission."""
from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from pydantic import BaseModel

from ..core.grid import Grid
from ..core.logging import logger
from ..schemas.reports import RunMetadata
from ..schemas.run_config import RunConfig
from ..services.experiments import run_metadata
from ..storage.emitters import summary_table, write_json

log = logger.getChild("cli")


@dataclass
class RunContext:
    cfg: RunConfig
    out_dir: Path
    seed: int
    threads: int
    resume: Optional[Path]

    @classmethod
    def from_args(cls, args: argparse.Namespace, cfg: RunConfig) -> "RunContext":
        out_dir = Path(args.out or cfg.output.directory)
        out_dir.mkdir(parents=True, exist_ok=True)
        return cls(cfg=cfg, out_dir=out_dir, seed=args.seed, threads=args.threads,
                   resume=Path(args.resume) if args.resume else None)

    def meta(self, grid: Grid) -> RunMetadata:
        return run_metadata(self.cfg, grid, self.seed, self.threads)


def emit(ctx: RunContext, name: str, report: BaseModel | dict, rows: Sequence[dict] = (),
         columns: Optional[Sequence[str]] = None) -> Path:
    """Write ``<out>/<name>.json`` and print the summary table."""
    payload = report.model_dump() if isinstance(report, BaseModel) else report
    path = write_json(ctx.out_dir / f"{name}.json", payload)
    if rows:
        print(summary_table(list(rows), columns))
    return path
