"""Independent double-precision reference implementation used as a test
oracle.  Written against numpy and python ints only (no shared code with
the production kernels) and kept to the literal textbook formulas, e.g.
the theta bucket uses nint(n_max*(theta+pi)/(2*pi)) directly rather than
the folded-offset form."""

import struct

import numpy as np


def nint(x):
    return np.ceil(np.floor(2.0 * np.asarray(x, dtype=np.float64)) / 2.0)


def spherical(v):
    x, y, z = (np.asarray(v, dtype=np.float64).reshape(-1, 3).T)
    r = np.sqrt(x * x + y * y + z * z)
    theta = np.arctan2(y, x)
    phi = np.arccos(np.clip(z / np.where(r > 0, r, 1.0), -1.0, 1.0))
    theta = np.where(r == 0, 0.0, theta)
    phi = np.where(r == 0, 0.0, phi)
    return r, theta, phi


def quantize(theta, phi, n_theta_max, n_phi_max):
    nt = nint(n_theta_max * (theta + np.pi) / (2.0 * np.pi))
    nph = nint(n_phi_max * phi / np.pi)
    nt = np.clip(nt, 0, n_theta_max).astype(np.int64)
    nph = np.clip(nph, 0, n_phi_max).astype(np.int64)
    return nt, nph


def dequantize(nt, nph, n_theta_max, n_phi_max):
    theta = np.pi * (2.0 * np.asarray(nt, dtype=np.float64) / n_theta_max - 1.0)
    phi = np.pi * np.asarray(nph, dtype=np.float64) / n_phi_max
    return theta, phi


def float32_bits(x: float) -> int:
    return struct.unpack("<I", struct.pack("<f", x))[0]


def bits_float32(b: int) -> float:
    return struct.unpack("<f", struct.pack("<I", b))[0]


def narrow_up(r: float) -> float:
    """Round a python float to float32 toward +inf."""
    f = bits_float32(float32_bits(r))
    if f < r:
        b = float32_bits(f)
        f = bits_float32(b + 1)  # next float32 up (r > 0 here)
    return f


def encode_magnitude(r: float, e_bits: int, m_bits: int, bias: int) -> int:
    if r == 0.0:
        return 0
    bits = float32_bits(narrow_up(r))
    e8 = (bits >> 23) & 0xFF
    tail = bits & 0x7FFFFF
    e7 = e8 - 127 + bias
    emax = (1 << e_bits) - 1
    if e7 <= 1:
        return 2 << m_bits
    if e7 >= emax:
        return ((emax - 1) << m_bits) | ((1 << m_bits) - 1)
    return (e7 << m_bits) | (tail >> (23 - m_bits))


def decode_magnitude(field: int, e_bits: int, m_bits: int, bias: int) -> float:
    if field == 0:
        return 0.0
    e7 = (field >> m_bits) & ((1 << e_bits) - 1)
    mant = field & ((1 << m_bits) - 1)
    e8 = min(max(e7 - bias + 127, 0), 254)
    return bits_float32((e8 << 23) | (mant << (23 - m_bits)))


def compress(v, layout):
    """All-double reference compressor returning python-int words."""
    r, theta, phi = spherical(v)
    nt, nph = quantize(theta, phi, layout.n_theta_max, layout.n_phi_max)
    words = []
    shift_mag = layout.phi_bits + layout.theta_bits
    for ri, a, b in zip(r, nt, nph):
        if ri == 0.0:
            words.append(0)
            continue
        mag = encode_magnitude(float(ri), layout.exponent_bits,
                               layout.mantissa_bits, layout.exponent_bias)
        words.append((mag << shift_mag) | (int(b) << layout.theta_bits) | int(a))
    return words


def decompress(words, layout):
    out = np.empty((len(words), 3), dtype=np.float32)
    tmask = (1 << layout.theta_bits) - 1
    pmask = (1 << layout.phi_bits) - 1
    for i, w in enumerate(words):
        w = int(w)
        nt = w & tmask
        nph = (w >> layout.theta_bits) & pmask
        field = w >> (layout.phi_bits + layout.theta_bits)
        if field == 0:
            out[i] = 0.0
            continue
        r = decode_magnitude(field, layout.exponent_bits,
                             layout.mantissa_bits, layout.exponent_bias)
        th = np.pi * (2.0 * nt / layout.n_theta_max - 1.0)
        ph = np.pi * nph / layout.n_phi_max
        out[i, 0] = np.float32(r * np.cos(th) * np.sin(ph))
        out[i, 1] = np.float32(r * np.sin(th) * np.sin(ph))
        out[i, 2] = np.float32(r * np.cos(ph))
    return out
