"""Coefficients for the in-package single-precision trigonometry.

Both functions use the classic odd-polynomial correction form

    atan(t) = t + t*z*Q_atan(z),   z = t*t,  t in [0, 1]
    asin(x) = x + x*z*Q_asin(z),   z = x*x,  x in [0, 0.5]

with the Horner sum evaluated in float64 and a single rounding to
float32 at the end.  The minimax fits were chosen so the pipelines land
in the accuracy class of a conventional (pre-correctly-rounded) libm:
roughly half-ulp mean error against exact results.  Coefficients are
frozen as hex so results are identical on every platform.
"""

# atan correction on [0, 1]; max approximation error ~0.21 ulp of float32.
ATAN_Q = (
    float.fromhex("-0x1.5554ee890806fp-2"),
    float.fromhex("0x1.997b7924aa8f1p-3"),
    float.fromhex("-0x1.231c3e32e0e58p-3"),
    float.fromhex("0x1.b55760bdb2d66p-4"),
    float.fromhex("-0x1.36309347af22dp-4"),
    float.fromhex("0x1.63b9fa6a62bfdp-5"),
    float.fromhex("-0x1.0e02eab0b70f2p-6"),
    float.fromhex("0x1.81fc37099279bp-9"),
)

# asin correction on [0, 0.5]; max approximation error ~0.07 ulp of float32.
ASIN_Q = (
    float.fromhex("0x1.5555bd6f47f8dp-3"),
    float.fromhex("0x1.330560cdcb21cp-4"),
    float.fromhex("0x1.742c47410ba97p-5"),
    float.fromhex("0x1.8f2b9cb95b714p-6"),
    float.fromhex("0x1.56eddb3a21eebp-5"),
)
