"""Compressed stream file format and text/binary vector IO.

A stream file is a 20-byte header followed by ``count`` little-endian
64-bit words:

    offset  size  field
    0       4     magic  b"VC3C"
    4       1     format version (1)
    5       5     layout widths s, e, m, p, t (one byte each)
    10      1     exponent bias
    11      1     reserved (zero)
    12      8     word count, little-endian unsigned

Raw binary vector files are flat little-endian float32 triplets; CSV
files carry one ``x,y,z`` row per vector using the shortest decimal
representation that parses back to the same float32.
"""

from __future__ import annotations

import io
import struct
from contextlib import contextmanager

import numpy as np

from .errors import BadLayout, BadMagic, TruncatedStream
from .layout import BitLayout

MAGIC = b"VC3C"
VERSION = 1
_HEADER = struct.Struct("<4s8BQ")
HEADER_SIZE = _HEADER.size
assert HEADER_SIZE == 20


@contextmanager
def _open(file, mode):
    if isinstance(file, (str, bytes)) or hasattr(file, "__fspath__"):
        f = open(file, mode)
        try:
            yield f
        finally:
            f.close()
    else:
        yield file


def pack_header(layout: BitLayout, count: int) -> bytes:
    return _HEADER.pack(
        MAGIC, VERSION,
        layout.sign_bits, layout.exponent_bits, layout.mantissa_bits,
        layout.phi_bits, layout.theta_bits, layout.exponent_bias,
        0, count,
    )


def parse_header(data: bytes) -> tuple[BitLayout, int]:
    if len(data) < HEADER_SIZE:
        raise TruncatedStream(f"header needs {HEADER_SIZE} bytes, got {len(data)}")
    magic, version, s, e, m, p, t, bias, _reserved, count = _HEADER.unpack(
        data[:HEADER_SIZE]
    )
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    if version != VERSION:
        raise BadLayout(f"unsupported stream version {version}")
    return BitLayout(s, e, m, p, t, bias), count


def write_stream(file, words: np.ndarray, layout: BitLayout) -> None:
    words = np.ascontiguousarray(np.asarray(words, dtype=np.uint64).ravel())
    with _open(file, "wb") as f:
        f.write(pack_header(layout, words.size))
        f.write(words.astype("<u8", copy=False).tobytes())


def read_stream(file) -> tuple[np.ndarray, BitLayout]:
    with _open(file, "rb") as f:
        layout, count = parse_header(f.read(HEADER_SIZE))
        payload = f.read(8 * count)
        if len(payload) < 8 * count:
            raise TruncatedStream(
                f"expected {count} words ({8 * count} bytes), got {len(payload)} bytes"
            )
        words = np.frombuffer(payload, dtype="<u8", count=count).astype(np.uint64)
    return words, layout


def write_f32(file, vectors: np.ndarray) -> None:
    v = np.ascontiguousarray(np.asarray(vectors, dtype=np.float32))
    with _open(file, "wb") as f:
        f.write(v.astype("<f4", copy=False).tobytes())


def read_f32(file) -> np.ndarray:
    with _open(file, "rb") as f:
        data = f.read()
    if len(data) % 12 != 0:
        raise TruncatedStream(
            f"raw vector stream length {len(data)} is not a multiple of 12"
        )
    return np.frombuffer(data, dtype="<f4").astype(np.float32).reshape(-1, 3)


def write_csv(file, vectors: np.ndarray) -> None:
    v = np.asarray(vectors, dtype=np.float32)
    buf = io.StringIO()
    for row in v:
        buf.write(f"{row[0]},{row[1]},{row[2]}\n")
    data = buf.getvalue()
    with _open(file, "w") as f:
        f.write(data)


def read_csv(file) -> np.ndarray:
    with _open(file, "r") as f:
        text = f.read()
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise TruncatedStream(f"line {lineno}: expected 3 fields, got {len(parts)}")
        rows.append([np.float32(p) for p in parts])
    return np.array(rows, dtype=np.float32).reshape(-1, 3)
