import struct

import numpy as np
import pytest

from solitonlab.core.errors import CorruptHeader, TruncatedPayload, UnsupportedVersion
from solitonlab.core.grid import make_grid
from solitonlab.storage.checkpoint import (KIND_SCALAR, KIND_SPINOR, encode_header, header_size, read_checkpoint,
                                           write_checkpoint)


@pytest.fixture
def field(grid1d, rng):
    return rng.standard_normal(grid1d.shape) + 1j * rng.standard_normal(grid1d.shape)


def test_scalar_checkpoint_is_bit_exact(tmp_path, grid1d, field):
    path = write_checkpoint(tmp_path / "u.nlss", grid1d, 1.25, field)
    ckpt = read_checkpoint(path)
    assert ckpt.grid == grid1d
    assert ckpt.t == 1.25
    assert ckpt.kind == KIND_SCALAR
    assert np.array_equal(ckpt.field.view(np.uint64), field.view(np.uint64))


def test_spinor_checkpoint(tmp_path, grid1d, field):
    z = np.stack([field, np.conj(field)])
    ckpt = read_checkpoint(write_checkpoint(tmp_path / "z.nlss", grid1d, 0.0, z))
    assert ckpt.kind == KIND_SPINOR
    assert np.array_equal(ckpt.field, z)


def test_header_layout_in_three_dimensions():
    grid = make_grid(3, 8, 10.0)
    header = encode_header(grid, 2.5, KIND_SCALAR)
    assert len(header) == header_size(3) == 60
    assert header[:4] == b"NLSS"
    assert struct.unpack_from("<II", header, 4) == (1, 3)
    assert struct.unpack_from("<3I", header, 12) == (8, 8, 8)
    assert struct.unpack_from("<d", header, 48) == (2.5,)


def test_payload_size(tmp_path, grid1d, field):
    path = write_checkpoint(tmp_path / "u.nlss", grid1d, 0.0, field)
    assert path.stat().st_size == header_size(1) + 16 * grid1d.size


def test_shape_mismatch_is_rejected(tmp_path, grid1d):
    with pytest.raises(ValueError):
        write_checkpoint(tmp_path / "u.nlss", grid1d, 0.0, np.zeros(10, dtype=complex))


def test_missing_magic(tmp_path):
    path = tmp_path / "bad.nlss"
    path.write_bytes(b"XXXX" + bytes(64))
    with pytest.raises(CorruptHeader):
        read_checkpoint(path)


def test_unsupported_version(tmp_path, grid1d, field):
    path = write_checkpoint(tmp_path / "u.nlss", grid1d, 0.0, field)
    data = bytearray(path.read_bytes())
    data[4:8] = struct.pack("<I", 2)
    path.write_bytes(bytes(data))
    with pytest.raises(UnsupportedVersion):
        read_checkpoint(path)


def test_truncated_payload(tmp_path, grid1d, field):
    path = write_checkpoint(tmp_path / "u.nlss", grid1d, 0.0, field)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(TruncatedPayload):
        read_checkpoint(path)


def test_trailing_bytes(tmp_path, grid1d, field):
    path = write_checkpoint(tmp_path / "u.nlss", grid1d, 0.0, field)
    path.write_bytes(path.read_bytes() + b"\0")
    with pytest.raises(CorruptHeader):
        read_checkpoint(path)


def test_unknown_kind(tmp_path, grid1d, field):
    path = write_checkpoint(tmp_path / "u.nlss", grid1d, 0.0, field)
    data = bytearray(path.read_bytes())
    data[header_size(1) - 4:header_size(1)] = struct.pack("<I", 7)
    path.write_bytes(bytes(data))
    with pytest.raises(CorruptHeader):
        read_checkpoint(path)


def test_no_temporary_files_left_behind(tmp_path, grid1d, field):
    write_checkpoint(tmp_path / "u.nlss", grid1d, 0.0, field)
    assert [p.name for p in tmp_path.iterdir()] == ["u.nlss"]
