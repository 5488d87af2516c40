"""Numba kernels: the normative numeric core of the codec.

Everything bit-level lives here so that batch calls, scalar calls, and the
benchmark kernels all run the exact same compiled code paths.  The
single-precision trigonometry is implemented in-package (see `_trig`) so
results do not depend on the platform libm; double precision uses libm.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from ._trig import ATAN_Q, ASIN_Q

F32 = np.float32
_PI = 3.141592653589793
_PI_2 = 1.5707963267948966


@njit(cache=True, inline="always")
def _atan_q(z):
    q = ATAN_Q[7]
    for i in range(6, -1, -1):
        q = q * z + ATAN_Q[i]
    return q


@njit(cache=True, inline="always")
def _asin_q(z):
    q = ASIN_Q[4]
    for i in range(3, -1, -1):
        q = q * z + ASIN_Q[i]
    return q


@njit(cache=True, inline="always")
def atan2_f32(y, x):
    """Quadrant-aware arctangent on float32, range [-pi, pi].

    atan2_f32(0, 0) is defined as 0; y == +/-0 with x < 0 returns +pi.
    """
    ax = abs(x)
    ay = abs(y)
    hi = max(ax, ay)
    lo = min(ax, ay)
    t = lo / hi if hi > F32(0) else F32(0)
    td = np.float64(t)
    z = td * td
    a = F32(td + td * z * _atan_q(z))
    if ay > ax:
        a = F32(F32(_PI_2) - a)
    if x < F32(0):
        a = F32(F32(_PI) - a)
    if y < F32(0):
        a = -a
    if y == F32(0):
        a = F32(_PI) if x < F32(0) else F32(0)
    return a


@njit(cache=True, inline="always")
def acos_f32(w):
    """Arccosine on float32, domain [-1, 1], range [0, pi]."""
    aw = abs(w)
    if aw <= F32(0.5):
        z32 = w * w
        xd = np.float64(w)
        z = np.float64(z32)
        asn = xd + xd * z * _asin_q(z)
        return F32(_PI_2 - asn)
    zs = F32((F32(1) - aw) * F32(0.5))
    xs = F32(math.sqrt(np.float64(zs)))
    xd = np.float64(xs)
    z = np.float64(zs)
    asn = xd + xd * z * _asin_q(z)
    big = F32(2.0 * asn)
    return big if w > F32(0) else F32(F32(_PI) - big)


@njit(cache=True, inline="always")
def nint_f64(x):
    """Nearest integer with halves rounded toward +inf: ceil(floor(2x)/2)."""
    return math.ceil(math.floor(2.0 * x) / 2.0)


@njit(cache=True, inline="always")
def _spherical(x, y, z, theta_single, phi_single):
    """(r64, theta, phi) for one finite float32 triple under a policy.

    r is the double-precision norm.  When phi runs in single precision its
    quotient uses a float32-arithmetic norm so the phi pipeline does not
    depend on the theta setting.  Angles are returned as float64 holding
    either the float32 result (single) or the libm result (double).
    """
    xd = np.float64(x)
    yd = np.float64(y)
    zd = np.float64(z)
    r64 = math.sqrt(xd * xd + yd * yd + zd * zd)
    if r64 == 0.0:
        return 0.0, 0.0, 0.0
    if theta_single:
        th = np.float64(atan2_f32(y, x))
    else:
        th = math.atan2(yd, xd)
    if phi_single:
        rq = F32(math.sqrt(np.float64((x * x + y * y) + z * z)))
        if rq > F32(0):
            w = z / rq
            if w > F32(1):
                w = F32(1)
            if w < F32(-1):
                w = F32(-1)
        else:
            w = F32(1)
        ph = np.float64(acos_f32(w))
    else:
        w64 = zd / r64
        if w64 > 1.0:
            w64 = 1.0
        if w64 < -1.0:
            w64 = -1.0
        ph = math.acos(w64)
    return r64, th, ph


@njit(cache=True, inline="always")
def _quantize(th, ph, ntmax, npmax, quant_single):
    """Bucket indices for one angle pair; bucket arithmetic in float64."""
    if quant_single:
        th = np.float64(F32(th))
        ph = np.float64(F32(ph))
    vt = ntmax / 2.0 + th * (ntmax / (2.0 * _PI))
    vp = ph * (npmax / _PI)
    nt = np.int64(nint_f64(vt))
    nph = np.int64(nint_f64(vp))
    if nt < 0:
        nt = 0
    if nt > ntmax:
        nt = ntmax
    if nph < 0:
        nph = 0
    if nph > npmax:
        nph = npmax
    return nt, nph


@njit(cache=True, inline="always")
def _encode_mag(r64, e_bits, m_bits, bias):
    """Magnitude field from the double-precision norm.

    The norm is narrowed to float32 rounding toward +inf before the
    mantissa tail is truncated; this centres each truncation cell on its
    reconstruction point and keeps re-encoding of decompressed vectors
    exact.  Exponent underflow flushes to the lowest supported normal
    value, overflow saturates to the largest finite encodable value.
    """
    if r64 == 0.0:
        return np.int64(0)
    r32 = F32(r64)
    if np.float64(r32) < r64:
        r32 = np.nextafter(r32, F32(np.inf))
    # fresh temp: scalar .view needs a single static definition
    u = np.int64(F32(r32).view(np.uint32))
    e8 = (u >> 23) & 0xFF
    tail = u & 0x7FFFFF
    e7 = e8 - 127 + bias
    emax = (np.int64(1) << e_bits) - 1
    if e7 <= 1:
        return np.int64(2) << m_bits
    if e7 >= emax:
        return ((emax - 1) << m_bits) | ((np.int64(1) << m_bits) - 1)
    return (e7 << m_bits) | (tail >> (23 - m_bits))


@njit(cache=True, inline="always")
def _decode_mag(field, e_bits, m_bits, bias):
    """float32 magnitude from a field; zero field decodes to 0.

    Exponents the encoder never emits (possible in adversarial words) are
    clamped into the finite float32 range so every word decodes finite.
    """
    if field == np.int64(0):
        return F32(0)
    e7 = (field >> m_bits) & ((np.int64(1) << e_bits) - 1)
    mant = field & ((np.int64(1) << m_bits) - 1)
    e8 = e7 - bias + 127
    if e8 < 0:
        e8 = np.int64(0)
    if e8 > 254:
        e8 = np.int64(254)
    bits = np.uint32((e8 << 23) | (mant << (23 - m_bits)))
    return bits.view(np.float32)


@njit(cache=True, inline="always")
def _compress_one(x, y, z, e_bits, m_bits, p, t, bias,
                  theta_single, phi_single, quant_single):
    r64, th, ph = _spherical(x, y, z, theta_single, phi_single)
    if r64 == 0.0:
        return np.uint64(0)
    ntmax = (np.int64(1) << t) - 1
    npmax = (np.int64(1) << p) - 1
    nt, nph = _quantize(th, ph, ntmax, npmax, quant_single)
    field = _encode_mag(r64, e_bits, m_bits, bias)
    return (
        (np.uint64(field) << np.uint64(p + t))
        | (np.uint64(nph) << np.uint64(t))
        | np.uint64(nt)
    )


@njit(cache=True)
def compress_kernel(vx, vy, vz, out, e_bits, m_bits, p, t, bias,
                    theta_single, phi_single, quant_single):
    for i in range(vx.size):
        out[i] = _compress_one(vx[i], vy[i], vz[i], e_bits, m_bits, p, t, bias,
                               theta_single, phi_single, quant_single)


@njit(cache=True)
def spherical_kernel(vx, vy, vz, out_r, out_th, out_ph, theta_single, phi_single):
    for i in range(vx.size):
        r, th, ph = _spherical(vx[i], vy[i], vz[i], theta_single, phi_single)
        out_r[i] = r
        out_th[i] = th
        out_ph[i] = ph


@njit(cache=True)
def quantize_kernel(th, ph, nt, nph, ntmax, npmax, quant_single):
    for i in range(th.size):
        a, b = _quantize(th[i], ph[i], ntmax, npmax, quant_single)
        nt[i] = a
        nph[i] = b


@njit(cache=True)
def encode_mag_kernel(r, out, e_bits, m_bits, bias):
    for i in range(r.size):
        out[i] = _encode_mag(r[i], e_bits, m_bits, bias)


@njit(cache=True)
def decode_mag_kernel(fields, out, e_bits, m_bits, bias):
    for i in range(fields.size):
        out[i] = _decode_mag(fields[i], e_bits, m_bits, bias)


@njit(cache=True)
def angle_tables(t, p, sin_t, cos_t, sin_p, cos_p):
    """sin/cos of every reconstructed angle, in float64.

    The phi endpoint holds its exact values (sin pi = 0, cos pi = -1), so
    both poles reconstruct exactly; sin(pi) through the float64 pi constant
    would otherwise leave a 1.2e-16 residue.  The theta endpoints keep
    their residues: the signed ~1e-16 azimuth component they produce is
    what lets a re-compression recover the theta bucket at +/-pi.
    """
    ntmax = (1 << t) - 1
    npmax = (1 << p) - 1
    for n in range(ntmax + 1):
        th = _PI * (2.0 * n / ntmax - 1.0)
        sin_t[n] = math.sin(th)
        cos_t[n] = math.cos(th)
    for n in range(npmax + 1):
        ph = _PI * n / npmax
        sin_p[n] = math.sin(ph)
        cos_p[n] = math.cos(ph)
    sin_p[npmax] = 0.0
    cos_p[npmax] = -1.0


@njit(cache=True, inline="always")
def _decompress_one_tab(w, e_bits, m_bits, p, t, bias, sin_t, cos_t, sin_p, cos_p):
    tmask = (np.uint64(1) << np.uint64(t)) - np.uint64(1)
    pmask = (np.uint64(1) << np.uint64(p)) - np.uint64(1)
    nt = np.int64(w & tmask)
    nph = np.int64((w >> np.uint64(t)) & pmask)
    field = np.int64(w >> np.uint64(p + t))
    if field == 0:
        return F32(0), F32(0), F32(0)
    r = np.float64(_decode_mag(field, e_bits, m_bits, bias))
    return (
        F32(r * cos_t[nt] * sin_p[nph]),
        F32(r * sin_t[nt] * sin_p[nph]),
        F32(r * cos_p[nph]),
    )


@njit(cache=True)
def decompress_kernel_tab(words, ox, oy, oz, e_bits, m_bits, p, t, bias,
                          sin_t, cos_t, sin_p, cos_p):
    for i in range(words.size):
        x, y, z = _decompress_one_tab(words[i], e_bits, m_bits, p, t, bias,
                                      sin_t, cos_t, sin_p, cos_p)
        ox[i] = x
        oy[i] = y
        oz[i] = z


@njit(cache=True)
def decompress_kernel_direct(words, ox, oy, oz, e_bits, m_bits, p, t, bias):
    # Same reconstruction as the table path; sin/cos evaluated per word.
    tmask = (np.uint64(1) << np.uint64(t)) - np.uint64(1)
    pmask = (np.uint64(1) << np.uint64(p)) - np.uint64(1)
    ntmax = (np.int64(1) << t) - 1
    npmax = (np.int64(1) << p) - 1
    for i in range(words.size):
        w = words[i]
        nt = np.int64(w & tmask)
        nph = np.int64((w >> np.uint64(t)) & pmask)
        field = np.int64(w >> np.uint64(p + t))
        if field == 0:
            ox[i] = F32(0)
            oy[i] = F32(0)
            oz[i] = F32(0)
            continue
        r = np.float64(_decode_mag(field, e_bits, m_bits, bias))
        th = _PI * (2.0 * nt / ntmax - 1.0)
        ph = _PI * nph / npmax
        st, ct = math.sin(th), math.cos(th)
        if nph == npmax:
            sp, cp = 0.0, -1.0  # exact phi = pi, as in the tables
        else:
            sp, cp = math.sin(ph), math.cos(ph)
        ox[i] = F32(r * ct * sp)
        oy[i] = F32(r * st * sp)
        oz[i] = F32(r * cp)


@njit(cache=True)
def dequantize_kernel(nt, nph, th_hat, ph_hat, ntmax, npmax):
    for i in range(nt.size):
        th_hat[i] = _PI * (2.0 * nt[i] / ntmax - 1.0)
        ph_hat[i] = _PI * nph[i] / npmax


@njit(cache=True)
def add_raw_kernel(a, b, c):
    # flat float32 views; pure streaming add
    for i in range(a.size):
        c[i] = a[i] + b[i]


@njit(cache=True)
def add_compressed_kernel(a, b, c, e_bits, m_bits, p, t, bias,
                          sin_t, cos_t, sin_p, cos_p,
                          theta_single, phi_single, quant_single):
    for i in range(a.size):
        x1, y1, z1 = _decompress_one_tab(a[i], e_bits, m_bits, p, t, bias,
                                         sin_t, cos_t, sin_p, cos_p)
        x2, y2, z2 = _decompress_one_tab(b[i], e_bits, m_bits, p, t, bias,
                                         sin_t, cos_t, sin_p, cos_p)
        c[i] = _compress_one(x1 + x2, y1 + y2, z1 + z2,
                             e_bits, m_bits, p, t, bias,
                             theta_single, phi_single, quant_single)
