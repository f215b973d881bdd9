"""NLSS checkpoint files.

Layout (little-endian):

    magic     4 bytes   b"NLSS"
    version   u32
    dim       u32
    points    dim × u32
    box       dim × f64
    t         f64
    kind      u32       0 = scalar, 1 = spinor
    payload   interleaved (re, im) f64, row-major, spinor components outermost
"""
from __future__ import annotations

import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from ..core.errors import CorruptHeader, TruncatedPayload, UnsupportedVersion
from ..core.grid import Grid
from ..core.logging import logger

log = logger.getChild("checkpoint")

MAGIC = b"NLSS"
FORMAT_VERSION = 1
KIND_SCALAR = 0
KIND_SPINOR = 1
_KIND_MULTIPLIER = {KIND_SCALAR: 1, KIND_SPINOR: 2}
_PAYLOAD_DTYPE = np.dtype("<c16")

PathLike = Union[str, os.PathLike]


@dataclass
class Checkpoint:
    grid: Grid
    t: float
    field: np.ndarray
    version: int = FORMAT_VERSION

    @property
    def kind(self) -> int:
        return KIND_SPINOR if self.field.ndim == self.grid.dim + 1 else KIND_SCALAR


def header_size(dim: int) -> int:
    return 4 + 4 + 4 + 4 * dim + 8 * dim + 8 + 4


def encode_header(grid: Grid, t: float, kind: int, version: int = FORMAT_VERSION) -> bytes:
    dim = grid.dim
    return (MAGIC
            + struct.pack("<II", version, dim)
            + struct.pack(f"<{dim}I", *grid.shape)
            + struct.pack(f"<{dim}d", *grid.box_length)
            + struct.pack("<d", float(t))
            + struct.pack("<I", kind))


def write_checkpoint(path: PathLike, grid: Grid, t: float, field: np.ndarray) -> Path:
    """Write atomically: temp file in the target directory, then os.replace."""
    path = Path(path)
    ckpt = Checkpoint(grid=grid, t=t, field=np.asarray(field))
    expected = ((2,) if ckpt.kind == KIND_SPINOR else ()) + grid.shape
    if ckpt.field.shape != expected:
        raise ValueError(f"field shape {ckpt.field.shape} does not match grid {grid.shape}")
    payload = np.ascontiguousarray(ckpt.field, dtype=_PAYLOAD_DTYPE).tobytes()
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".nlss-", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(encode_header(grid, t, ckpt.kind))
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    log.debug("wrote checkpoint %s (t = %.6g, %d bytes payload)", path, t, len(payload))
    return path


def read_checkpoint(path: PathLike) -> Checkpoint:
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != MAGIC:
        raise CorruptHeader(f"{path}: missing NLSS magic")
    version, dim = struct.unpack_from("<II", data, 4)
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"{path}: format version {version}, this reader handles {FORMAT_VERSION}")
    if dim not in (1, 2, 3):
        raise CorruptHeader(f"{path}: invalid dimension {dim}")
    hsize = header_size(dim)
    if len(data) < hsize:
        raise CorruptHeader(f"{path}: header truncated")
    points = struct.unpack_from(f"<{dim}I", data, 12)
    box = struct.unpack_from(f"<{dim}d", data, 12 + 4 * dim)
    (t,) = struct.unpack_from("<d", data, 12 + 12 * dim)
    (kind,) = struct.unpack_from("<I", data, 20 + 12 * dim)
    if kind not in _KIND_MULTIPLIER:
        raise CorruptHeader(f"{path}: unknown field kind {kind}")
    if len(set(points)) != 1:
        raise CorruptHeader(f"{path}: anisotropic point counts {points} are not supported")
    try:
        grid = Grid(dim=dim, points_per_axis=points[0], box_length=tuple(box))
    except ValueError as exc:
        raise CorruptHeader(f"{path}: {exc}") from exc
    n_values = _KIND_MULTIPLIER[kind] * grid.size
    expected = hsize + n_values * _PAYLOAD_DTYPE.itemsize
    if len(data) < expected:
        raise TruncatedPayload(f"{path}: payload has {len(data) - hsize} bytes, expected {expected - hsize}")
    if len(data) > expected:
        raise CorruptHeader(f"{path}: {len(data) - expected} trailing bytes after payload")
    values = np.frombuffer(data, dtype=_PAYLOAD_DTYPE, count=n_values, offset=hsize)
    shape = ((2,) if kind == KIND_SPINOR else ()) + grid.shape
    return Checkpoint(grid=grid, t=t, field=values.reshape(shape).astype(np.complex128), version=version)
