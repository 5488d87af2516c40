"""Compression and decompression of float32 3-vectors into 64-bit words.

One vector costs 96 bits raw; one compressed word is exactly 64 bits
(ratio 1.5).  The magnitude is stored as a reduced float (re-biased
exponent, truncated mantissa) and the direction as two quantised
spherical angles.  Packing, MSB to LSB: magnitude field (sign bit if
present, exponent, mantissa), then the phi index, then the theta index
in the lowest bits.  This assignment is normative and bit-exact.

All operations are pure functions; layouts and policies are immutable,
so everything here is safe to call concurrently.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import _kernels as _k
from .errors import NonFiniteInput
from .layout import DEFAULT_LAYOUT, DEFAULT_POLICY, BitLayout, PrecisionPolicy

__all__ = [
    "SphericalTriple",
    "nint",
    "to_spherical",
    "quantize_angles",
    "dequantize_angles",
    "encode_magnitude",
    "decode_magnitude",
    "compress",
    "decompress",
    "compress_one",
    "decompress_one",
    "predict_error",
]

# Above this many table entries, decompression evaluates sin/cos directly.
_TABLE_ENTRY_LIMIT = 1 << 21

_table_cache: dict[tuple[int, int], tuple] = {}


class SphericalTriple(NamedTuple):
    r: float
    theta: float
    phi: float


def _angle_tables(layout: BitLayout):
    key = (layout.theta_bits, layout.phi_bits)
    tabs = _table_cache.get(key)
    if tabs is None:
        t, p = key
        sin_t = np.empty(1 << t)
        cos_t = np.empty(1 << t)
        sin_p = np.empty(1 << p)
        cos_p = np.empty(1 << p)
        _k.angle_tables(t, p, sin_t, cos_t, sin_p, cos_p)
        tabs = (sin_t, cos_t, sin_p, cos_p)
        _table_cache[key] = tabs
    return tabs


def _has_tables(layout: BitLayout) -> bool:
    return (1 << layout.theta_bits) + (1 << layout.phi_bits) <= _TABLE_ENTRY_LIMIT


def _as_components(vectors) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    v = np.asarray(vectors, dtype=np.float32)
    if v.ndim == 1 and v.shape[0] == 3:
        v = v.reshape(1, 3)
    if v.ndim != 2 or v.shape[1] != 3:
        raise ValueError(f"expected shape (n, 3), got {v.shape}")
    if not np.isfinite(v).all():
        bad = int(np.count_nonzero(~np.isfinite(v).all(axis=1)))
        raise NonFiniteInput(f"{bad} vector(s) contain NaN or infinity")
    return (
        np.ascontiguousarray(v[:, 0]),
        np.ascontiguousarray(v[:, 1]),
        np.ascontiguousarray(v[:, 2]),
    )


def nint(x):
    """Round to the nearest integer, halves toward +inf: ceil(floor(2x)/2).

    Exact for |x| below 2**51 (every intermediate is representable).
    Scalars return int, arrays return int64.
    """
    a = np.asarray(x, dtype=np.float64)
    out = np.ceil(np.floor(2.0 * a) / 2.0)
    if np.isscalar(x) or a.ndim == 0:
        return int(out)
    return out.astype(np.int64)


def to_spherical(vectors, policy: PrecisionPolicy = DEFAULT_POLICY):
    """Spherical coordinates (r, theta, phi) of float32 vectors.

    r is the double-precision Euclidean norm; theta = atan2(y, x) in
    [-pi, pi] and phi = acos(z/r) in [0, pi] are evaluated at the
    precision the policy selects (returned as float64 values that hold
    the float32 result when the intermediate is single).  The zero
    vector maps to (0, 0, 0); non-finite components raise NonFiniteInput.
    """
    vx, vy, vz = _as_components(vectors)
    n = vx.size
    r = np.empty(n)
    th = np.empty(n)
    ph = np.empty(n)
    _k.spherical_kernel(vx, vy, vz, r, th, ph, policy.theta_single, policy.phi_single)
    return r, th, ph


def to_spherical_one(v, policy: PrecisionPolicy = DEFAULT_POLICY) -> SphericalTriple:
    r, th, ph = to_spherical(np.asarray(v, dtype=np.float32).reshape(1, 3), policy)
    return SphericalTriple(float(r[0]), float(th[0]), float(ph[0]))


def quantize_angles(theta, phi, layout: BitLayout = DEFAULT_LAYOUT,
                    policy: PrecisionPolicy = DEFAULT_POLICY):
    """Bucket indices (n_theta, n_phi) for angles in [-pi, pi] x [0, pi].

    Indices are clamped to [0, n_max].  The +pi offset for theta is folded
    into the exactly representable constant n_theta_max/2, so no addition
    is performed on the angle itself.
    """
    th = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    ph = np.atleast_1d(np.asarray(phi, dtype=np.float64))
    if th.shape != ph.shape:
        raise ValueError("theta and phi must have the same shape")
    nt = np.empty(th.size, dtype=np.int64)
    nph = np.empty(th.size, dtype=np.int64)
    _k.quantize_kernel(th.ravel(), ph.ravel(), nt, nph,
                       layout.n_theta_max, layout.n_phi_max, policy.quant_single)
    if np.isscalar(theta) or np.asarray(theta).ndim == 0:
        return int(nt[0]), int(nph[0])
    return nt.reshape(th.shape), nph.reshape(ph.shape)


def dequantize_angles(n_theta, n_phi, layout: BitLayout = DEFAULT_LAYOUT):
    """Reconstructed angles: theta_hat = pi*(2n/n_max - 1), phi_hat = pi*n/n_max."""
    nt = np.atleast_1d(np.asarray(n_theta, dtype=np.int64))
    nph = np.atleast_1d(np.asarray(n_phi, dtype=np.int64))
    th = np.empty(nt.size)
    ph = np.empty(nph.size)
    _k.dequantize_kernel(nt.ravel(), nph.ravel(), th, ph,
                         layout.n_theta_max, layout.n_phi_max)
    if np.isscalar(n_theta) or np.asarray(n_theta).ndim == 0:
        return float(th[0]), float(ph[0])
    return th.reshape(nt.shape), ph.reshape(nph.shape)


def encode_magnitude(r, layout: BitLayout = DEFAULT_LAYOUT):
    """Magnitude field bits for non-negative radii.

    The radius is narrowed to float32 rounding toward +inf and the
    mantissa tail is truncated to the layout's width (dropped bits decode
    as zero).  Exponents at or below the subnormal marker flush to the
    lowest supported normal value; overflow saturates to the largest
    finite encodable value.  Zero encodes to the all-zeros field.
    """
    a = np.atleast_1d(np.asarray(r, dtype=np.float64))
    if not np.isfinite(a).all():
        raise NonFiniteInput("magnitude must be finite")
    if (a < 0).any():
        raise ValueError("magnitude must be non-negative")
    out = np.empty(a.size, dtype=np.int64)
    _k.encode_mag_kernel(a.ravel(), out, layout.exponent_bits,
                         layout.mantissa_bits, layout.exponent_bias)
    if np.isscalar(r) or np.asarray(r).ndim == 0:
        return int(out[0])
    return out.reshape(a.shape).astype(np.uint64)


def decode_magnitude(field, layout: BitLayout = DEFAULT_LAYOUT):
    """float32 radius from a magnitude field; the zero field decodes to 0."""
    f = np.atleast_1d(np.asarray(field).astype(np.int64))
    out = np.empty(f.size, dtype=np.float32)
    _k.decode_mag_kernel(f.ravel(), out, layout.exponent_bits,
                         layout.mantissa_bits, layout.exponent_bias)
    if np.isscalar(field) or np.asarray(field).ndim == 0:
        return float(out[0])
    return out.reshape(f.shape)


def compress(vectors, layout: BitLayout = DEFAULT_LAYOUT,
             policy: PrecisionPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Pack each float32 3-vector into one 64-bit word.

    Deterministic for fixed (vectors, layout, policy); raises
    NonFiniteInput if any component is NaN or infinite.
    """
    vx, vy, vz = _as_components(vectors)
    out = np.empty(vx.size, dtype=np.uint64)
    _k.compress_kernel(vx, vy, vz, out,
                       layout.exponent_bits, layout.mantissa_bits,
                       layout.phi_bits, layout.theta_bits, layout.exponent_bias,
                       policy.theta_single, policy.phi_single, policy.quant_single)
    return out


def decompress(words, layout: BitLayout = DEFAULT_LAYOUT) -> np.ndarray:
    """Reconstruct (n, 3) float32 vectors from packed words.

    Every 64-bit word decodes to some finite vector; a zero magnitude
    field decodes to (0, 0, 0) regardless of the angle bits.
    """
    w = np.ascontiguousarray(np.asarray(words, dtype=np.uint64).ravel())
    n = w.size
    ox = np.empty(n, dtype=np.float32)
    oy = np.empty(n, dtype=np.float32)
    oz = np.empty(n, dtype=np.float32)
    if _has_tables(layout):
        sin_t, cos_t, sin_p, cos_p = _angle_tables(layout)
        _k.decompress_kernel_tab(w, ox, oy, oz,
                                 layout.exponent_bits, layout.mantissa_bits,
                                 layout.phi_bits, layout.theta_bits,
                                 layout.exponent_bias,
                                 sin_t, cos_t, sin_p, cos_p)
    else:
        _k.decompress_kernel_direct(w, ox, oy, oz,
                                    layout.exponent_bits, layout.mantissa_bits,
                                    layout.phi_bits, layout.theta_bits,
                                    layout.exponent_bias)
    return np.stack([ox, oy, oz], axis=1)


def compress_one(v, layout: BitLayout = DEFAULT_LAYOUT,
                 policy: PrecisionPolicy = DEFAULT_POLICY) -> int:
    return int(compress(np.asarray(v, dtype=np.float32).reshape(1, 3), layout, policy)[0])


def decompress_one(word: int, layout: BitLayout = DEFAULT_LAYOUT):
    v = decompress(np.asarray([word], dtype=np.uint64), layout)[0]
    return float(v[0]), float(v[1]), float(v[2])


def magnitude_event_counts(vectors, layout: BitLayout = DEFAULT_LAYOUT):
    """(flushed, saturated) counts for a batch of vectors.

    Flushed: nonzero magnitudes below the lowest supported normal value;
    saturated: magnitudes at or above the exponent-overflow threshold.
    """
    vx, vy, vz = _as_components(vectors)
    r = np.sqrt(vx.astype(np.float64) ** 2 + vy.astype(np.float64) ** 2
                + vz.astype(np.float64) ** 2)
    fields = encode_magnitude(r, layout)
    fields = np.atleast_1d(np.asarray(fields, dtype=np.uint64)).astype(np.int64)
    m = layout.mantissa_bits
    emax = (1 << layout.exponent_bits) - 1
    low = np.int64(2 << m)
    high = np.int64(((emax - 1) << m) | ((1 << m) - 1))
    # distinguish clamp events from values that legitimately encode to the rails
    r32 = r.astype(np.float32)
    up = np.where(r32.astype(np.float64) < r, np.nextafter(r32, np.float32(np.inf)), r32)
    e7 = ((up.view(np.uint32).astype(np.int64) >> 23) & 0xFF) - 127 + layout.exponent_bias
    flushed = int(np.count_nonzero((fields == low) & (e7 <= 1) & (r > 0)))
    saturated = int(np.count_nonzero((fields == high) & (e7 >= emax)))
    return flushed, saturated


def predict_error(r, theta, phi, layout: BitLayout = DEFAULT_LAYOUT):
    """First-order worst-case error-bound vector per component.

    Uses the quantisation half-widths eps_theta = pi/n_theta_max and
    eps_phi = pi/(2 n_phi_max) with every term taken in absolute value,
    so the result bounds the first-order reconstruction error regardless
    of error signs.  This is a test oracle envelope, not a codec path.
    """
    r = np.asarray(r, dtype=np.float64)
    th = np.asarray(theta, dtype=np.float64)
    ph = np.asarray(phi, dtype=np.float64)
    e_t = np.pi / layout.n_theta_max
    e_p = np.pi / (2.0 * layout.n_phi_max)
    st, ct = np.sin(th), np.cos(th)
    sp, cp = np.sin(ph), np.cos(ph)
    ex = r * (e_p * np.abs(ct * cp) + e_t * np.abs(st * sp))
    ey = r * (e_p * np.abs(st * cp) + e_t * np.abs(ct * sp))
    ez = r * e_p * np.abs(sp)
    return np.stack(np.broadcast_arrays(ex, ey, ez), axis=-1)
