"""Bandwidth benchmark: elementwise vector addition on raw float32
triplets versus compressed 64-bit words.

Raw moves 36 bytes per element (read two 12-byte vectors, write one);
compressed moves 24 (read two words, write one), a fixed 1.5x reduction.
The compressed kernel decompresses both inputs, adds, and recompresses
in registers, so its output words are identical to running the codec
functions separately.  Both kernels run single-threaded so the speedup
isolates memory traffic, not scheduling.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import codec
from . import _kernels as _k
from .analysis import SampleDomain
from .errors import LengthMismatch
from .layout import ALL_SINGLE_POLICY, DEFAULT_LAYOUT, BitLayout, PrecisionPolicy

RAW_BYTES_PER_ELEMENT = 36
COMPRESSED_BYTES_PER_ELEMENT = 24


def add_raw(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise float32 sum of two (n, 3) vector streams."""
    a = np.ascontiguousarray(a, dtype=np.float32)
    b = np.ascontiguousarray(b, dtype=np.float32)
    if a.shape != b.shape:
        raise LengthMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    c = np.empty_like(a)
    _k.add_raw_kernel(a.ravel(), b.ravel(), c.ravel())
    return c


def add_compressed(a: np.ndarray, b: np.ndarray,
                   layout: BitLayout = DEFAULT_LAYOUT,
                   policy: PrecisionPolicy = ALL_SINGLE_POLICY) -> np.ndarray:
    """Sum of two compressed streams: compress(decompress(a) + decompress(b))."""
    a = np.ascontiguousarray(a, dtype=np.uint64)
    b = np.ascontiguousarray(b, dtype=np.uint64)
    if a.shape != b.shape:
        raise LengthMismatch(f"lengths differ: {a.size} vs {b.size}")
    c = np.empty_like(a)
    _run_add_compressed(a, b, c, layout, policy)
    return c


def _run_add_compressed(a, b, c, layout, policy):
    if codec._has_tables(layout):
        sin_t, cos_t, sin_p, cos_p = codec._angle_tables(layout)
        _k.add_compressed_kernel(
            a, b, c,
            layout.exponent_bits, layout.mantissa_bits,
            layout.phi_bits, layout.theta_bits, layout.exponent_bias,
            sin_t, cos_t, sin_p, cos_p,
            policy.theta_single, policy.phi_single, policy.quant_single,
        )
    else:
        # huge angle fields: fall back to the composed batch operations
        c[:] = codec.compress(
            codec.decompress(a, layout) + codec.decompress(b, layout),
            layout, policy,
        )


@dataclass(frozen=True)
class BenchConfig:
    working_set_sweep: tuple[int, ...] = (1 << 14, 1 << 17, 1 << 20, 1 << 23)
    repeats: int = 5
    layout: BitLayout = DEFAULT_LAYOUT
    policy: PrecisionPolicy = ALL_SINGLE_POLICY
    seed: int = 0

    def __post_init__(self):
        if len(self.working_set_sweep) == 0 or min(self.working_set_sweep) < 1:
            raise ValueError("working_set_sweep needs positive element counts")
        if self.repeats < 3:
            raise ValueError("repeats must be >= 3 (median-of-repeats)")


@dataclass
class BenchResult:
    n: int
    bytes_moved_raw: int
    bytes_moved_compressed: int
    time_raw_ns: float
    time_compressed_ns: float
    speedup: float
    bytes_ratio: float

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def llc_bytes() -> int | None:
    """Size of the last-level data cache, or None if undiscoverable."""
    best = None
    base = Path("/sys/devices/system/cpu/cpu0/cache")
    if not base.is_dir():
        return None
    for idx in sorted(base.glob("index*")):
        try:
            ctype = (idx / "type").read_text().strip()
            if ctype not in ("Unified", "Data"):
                continue
            text = (idx / "size").read_text().strip()
        except OSError:
            continue
        mult = 1
        if text.endswith("K"):
            mult, text = 1024, text[:-1]
        elif text.endswith("M"):
            mult, text = 1024 * 1024, text[:-1]
        elif text.endswith("G"):
            mult, text = 1024 ** 3, text[:-1]
        try:
            size = int(text) * mult
        except ValueError:
            continue
        best = size if best is None else max(best, size)
    return best


def _median_time_ns(fn, repeats: int) -> float:
    fn()  # warm-up pass, excluded
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter_ns()
        fn()
        times.append(time.perf_counter_ns() - t0)
    return float(np.median(times))


def _measure_one(n: int, config: BenchConfig) -> BenchResult:
    layout, policy = config.layout, config.policy
    va = _vectors(n, config.seed, 0)
    vb = _vectors(n, config.seed, 1)
    ra, rb = va.ravel(), vb.ravel()
    rc = np.empty_like(ra)
    t_raw = _median_time_ns(lambda: _k.add_raw_kernel(ra, rb, rc), config.repeats)
    ca = _compress_chunked(va, layout, policy)
    cb = _compress_chunked(vb, layout, policy)
    del va, vb, ra, rb, rc
    cc = np.empty_like(ca)
    t_comp = _median_time_ns(
        lambda: _run_add_compressed(ca, cb, cc, layout, policy), config.repeats
    )
    return BenchResult(
        n=n,
        bytes_moved_raw=RAW_BYTES_PER_ELEMENT * n,
        bytes_moved_compressed=COMPRESSED_BYTES_PER_ELEMENT * n,
        time_raw_ns=t_raw,
        time_compressed_ns=t_comp,
        speedup=t_raw / t_comp,
        bytes_ratio=RAW_BYTES_PER_ELEMENT / COMPRESSED_BYTES_PER_ELEMENT,
    )


def _vectors(n: int, seed: int, stream: int) -> np.ndarray:
    out = np.empty((n, 3), dtype=np.float32)
    pos = 0
    for chunk in SampleDomain("cube", n, (seed << 1) | stream).chunks():
        out[pos:pos + chunk.shape[0]] = chunk
        pos += chunk.shape[0]
    return out


def _compress_chunked(v: np.ndarray, layout, policy, chunk: int = 1 << 20) -> np.ndarray:
    out = np.empty(v.shape[0], dtype=np.uint64)
    for i in range(0, v.shape[0], chunk):
        out[i:i + chunk] = codec.compress(v[i:i + chunk], layout, policy)
    return out


def sweep(config: BenchConfig) -> list[BenchResult]:
    """Time both kernels across the working-set sweep (median of repeats)."""
    return [_measure_one(int(n), config) for n in config.working_set_sweep]


def knee_elements(results: list[BenchResult]) -> int | None:
    """Largest sweep size whose raw working set fits the last-level cache."""
    cache = llc_bytes()
    if cache is None:
        return None
    fitting = [r.n for r in results if r.bytes_moved_raw <= cache]
    return max(fitting) if fitting else None
