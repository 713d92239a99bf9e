"""Binary embedding-blob format.

Layout: a 21-byte header (magic b"WIZS", version u32, dim u32, count u64,
dtype u8), then count x dim little-endian float32 values, row-major. File
length must be exactly 21 + 4 * dim * count. Vectors are stored at 32-bit
precision; all score computation happens in 64-bit after loading.
"""
from __future__ import annotations

import os
import struct

import numpy as np

from .errors import CorruptBlobError, MissingBlobError, NonFiniteError, ValidationError

MAGIC = b"WIZS"
FORMAT_VERSION = 1
DTYPE_FLOAT32 = 1
_HEADER = struct.Struct("<4sIIQB")
HEADER_SIZE = _HEADER.size  # 21

# header byte offsets, used in error messages
_OFF_MAGIC = 0
_OFF_VERSION = 4
_OFF_DIM = 8
_OFF_COUNT = 12
_OFF_DTYPE = 20


def write_blob(path, array) -> None:
    """Write a (count, dim) array as a blob, atomically (temp then rename)."""
    arr = np.asarray(array)
    if arr.ndim != 2:
        raise ValidationError(f"blob array must be 2-D (count, dim), got shape {arr.shape}")
    if arr.shape[1] < 1:
        raise ValidationError("blob dim must be >= 1")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("blob payload contains NaN or infinity")
    payload = np.ascontiguousarray(arr, dtype="<f4")
    header = _HEADER.pack(
        MAGIC, FORMAT_VERSION, int(arr.shape[1]), int(arr.shape[0]), DTYPE_FLOAT32
    )
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())
    os.replace(tmp, path)


def read_blob(path) -> np.ndarray:
    """Read a blob back as a (count, dim) little-endian float32 array.

    Structural failures raise CorruptBlobError naming the byte offset of the
    offending field; a missing file raises MissingBlobError.
    """
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except FileNotFoundError:
        raise MissingBlobError(f"embedding blob not found: {path}") from None
    if len(raw) < HEADER_SIZE:
        raise CorruptBlobError(
            f"{path}: truncated header, {len(raw)} bytes < {HEADER_SIZE} "
            f"(header spans bytes 0..{HEADER_SIZE - 1})"
        )
    magic, version, dim, count, dtype = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise CorruptBlobError(
            f"{path}: bad magic {magic!r} at byte offset {_OFF_MAGIC}, expected {MAGIC!r}"
        )
    if version != FORMAT_VERSION:
        raise CorruptBlobError(
            f"{path}: unsupported version {version} at byte offset {_OFF_VERSION}"
        )
    if dtype != DTYPE_FLOAT32:
        raise CorruptBlobError(
            f"{path}: unsupported dtype tag {dtype} at byte offset {_OFF_DTYPE}"
        )
    if dim < 1:
        raise CorruptBlobError(f"{path}: dim 0 at byte offset {_OFF_DIM}")
    expected = HEADER_SIZE + 4 * dim * count
    if len(raw) != expected:
        raise CorruptBlobError(
            f"{path}: file is {len(raw)} bytes but header at byte offsets "
            f"{_OFF_DIM}/{_OFF_COUNT} implies {expected} "
            f"(payload of {count}x{dim} float32 starting at byte {HEADER_SIZE})"
        )
    payload = np.frombuffer(raw, dtype="<f4", offset=HEADER_SIZE).reshape(count, dim)
    bad = np.argwhere(~np.isfinite(payload))
    if bad.size:
        r, c = int(bad[0][0]), int(bad[0][1])
        raise CorruptBlobError(
            f"{path}: non-finite payload value at row {r}, column {c} "
            f"(byte offset {HEADER_SIZE + 4 * (r * dim + c)})"
        )
    return payload.copy()
