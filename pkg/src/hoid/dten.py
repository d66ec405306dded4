"""Reader and writer for the ``.dten`` binary tensor format.

Layout (all little-endian)::

    b"DTEN"            4 bytes magic
    version  u16       currently 1
    order    u16       d
    dims     d x u64
    values   prod(dims) x float64, first index varying fastest
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"DTEN"
VERSION = 1
_HEADER = struct.Struct("<4sHH")


class DtenFormatError(ValueError):
    pass


def write_tensor(path, X) -> None:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim < 1 or X.ndim > 0xFFFF:
        raise ValueError(f"cannot store a tensor of order {X.ndim}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, X.ndim))
        fh.write(np.asarray(X.shape, dtype="<u8").tobytes())
        fh.write(np.ravel(X, order="F").astype("<f8").tobytes())


def read_tensor(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise DtenFormatError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, order = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise DtenFormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise DtenFormatError(f"{path}: unsupported version {version}")
    if order < 1:
        raise DtenFormatError(f"{path}: tensor order must be at least 1")
    offset = _HEADER.size
    if len(raw) < offset + 8 * order:
        raise DtenFormatError(f"{path}: truncated dimension block")
    dims = np.frombuffer(raw, dtype="<u8", count=order, offset=offset)
    if np.any(dims == 0):
        raise DtenFormatError(f"{path}: zero-length dimension in {tuple(dims)}")
    offset += 8 * order
    count = int(np.prod(dims.astype(object)))
    payload = len(raw) - offset
    if payload != 8 * count:
        raise DtenFormatError(
            f"{path}: dims {tuple(int(i) for i in dims)} need {8 * count} payload bytes, found {payload}"
        )
    values = np.frombuffer(raw, dtype="<f8", count=count, offset=offset)
    return values.astype(np.float64).reshape(tuple(int(i) for i in dims), order="F")
