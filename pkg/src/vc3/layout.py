"""Bit layouts and precision policies for the 64-bit packed word.

A layout partitions the word as ``<s,e,m>-p-t``: an optional sign bit,
``e`` exponent bits and ``m`` mantissa bits for the magnitude, then ``p``
bits for the polar-angle index and ``t`` bits for the azimuthal index.
The five widths must sum to exactly 64 (fixed-rate contract).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import BadLayout

SINGLE = "single"
DOUBLE = "double"

_LAYOUT_RE = re.compile(
    r"^\s*<?\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*>?-(\d+)-(\d+)\s*(?:@\s*(\d+))?\s*$"
)


def default_bias(exponent_bits: int) -> int:
    """Default exponent bias for a given exponent width.

    Eight bits keep the standard bias of 127; seven bits use the
    asymmetric bias 80 (range slanted toward small magnitudes); anything
    else falls back to the symmetric 2**(e-1).
    """
    if exponent_bits == 8:
        return 127
    if exponent_bits == 7:
        return 80
    return 1 << (exponent_bits - 1)


@dataclass(frozen=True)
class BitLayout:
    sign_bits: int = 0
    exponent_bits: int = 7
    mantissa_bits: int = 22
    phi_bits: int = 17
    theta_bits: int = 18
    exponent_bias: int = 80

    def __post_init__(self):
        s, e, m = self.sign_bits, self.exponent_bits, self.mantissa_bits
        p, t = self.phi_bits, self.theta_bits
        if s not in (0, 1):
            raise BadLayout(f"sign_bits must be 0 or 1, got {s}")
        if not 1 <= e <= 8:
            raise BadLayout(f"exponent_bits must be in [1, 8], got {e}")
        if not 1 <= m <= 23:
            raise BadLayout(f"mantissa_bits must be in [1, 23], got {m}")
        if not 1 <= p <= 32:
            raise BadLayout(f"phi_bits must be in [1, 32], got {p}")
        if not 1 <= t <= 32:
            raise BadLayout(f"theta_bits must be in [1, 32], got {t}")
        if s + e + m + p + t != 64:
            raise BadLayout(
                f"bit widths must sum to 64, got {s}+{e}+{m}+{p}+{t} = {s+e+m+p+t}"
            )
        if e == 8 and self.exponent_bias != 127:
            raise BadLayout("an 8-bit exponent must keep the standard bias 127")
        # bias <= 128 keeps every encoder-produced exponent decodable as a
        # normal float32 (lowest rail: E7=2 -> stored exponent 129 - bias >= 1)
        if not 0 <= self.exponent_bias <= 128:
            raise BadLayout(f"exponent_bias must be in [0, 128], got {self.exponent_bias}")

    @property
    def n_theta_max(self) -> int:
        return (1 << self.theta_bits) - 1

    @property
    def n_phi_max(self) -> int:
        return (1 << self.phi_bits) - 1

    @property
    def magnitude_bits(self) -> int:
        return self.sign_bits + self.exponent_bits + self.mantissa_bits

    def spec(self) -> str:
        """Render as the ``s,e,m-p-t[@bias]`` string accepted by :func:`parse_layout`."""
        base = (
            f"{self.sign_bits},{self.exponent_bits},{self.mantissa_bits}"
            f"-{self.phi_bits}-{self.theta_bits}"
        )
        if self.exponent_bias != default_bias(self.exponent_bits):
            base += f"@{self.exponent_bias}"
        return base

    def __str__(self) -> str:
        return (
            f"<{self.sign_bits},{self.exponent_bits},{self.mantissa_bits}>"
            f"-{self.phi_bits}-{self.theta_bits}"
        )


def parse_layout(text: str) -> BitLayout:
    """Parse ``"0,7,22-17-18"`` (optionally ``"<0,7,22>-17-18"`` or ``...@bias``)."""
    m = _LAYOUT_RE.match(text)
    if m is None:
        raise BadLayout(f"cannot parse layout {text!r}; expected s,e,m-p-t[@bias]")
    s, e, mant, p, t = (int(m.group(i)) for i in range(1, 6))
    bias = int(m.group(6)) if m.group(6) else default_bias(e)
    return BitLayout(s, e, mant, p, t, bias)


# Layouts studied throughout: the full-float base scheme and the three
# bit-redistribution candidates.
LAYOUT_BASE_16_16 = BitLayout(1, 8, 23, 16, 16, 127)
LAYOUT_16_17 = BitLayout(0, 8, 23, 16, 17, 127)
LAYOUT_17_17 = BitLayout(0, 7, 23, 17, 17, 80)
LAYOUT_17_18 = BitLayout(0, 7, 22, 17, 18, 80)
DEFAULT_LAYOUT = LAYOUT_17_18


@dataclass(frozen=True)
class PrecisionPolicy:
    """Which intermediates run in single vs. double precision.

    ``theta`` and ``phi`` select the working precision of the angle
    computations (two-argument arctangent, and the z/r quotient plus
    arccosine).  ``quantisation`` selects the precision the angle is
    narrowed to before bucket arithmetic.  The default reflects the
    recommended production configuration: theta in single, phi in double,
    quantisation on the single-precision angle.
    """

    theta: str = SINGLE
    phi: str = DOUBLE
    quantisation: str = SINGLE

    def __post_init__(self):
        for name in ("theta", "phi", "quantisation"):
            v = getattr(self, name)
            if v not in (SINGLE, DOUBLE):
                raise ValueError(f"{name} must be 'single' or 'double', got {v!r}")

    @property
    def theta_single(self) -> bool:
        return self.theta == SINGLE

    @property
    def phi_single(self) -> bool:
        return self.phi == SINGLE

    @property
    def quant_single(self) -> bool:
        return self.quantisation == SINGLE

    def spec(self) -> str:
        code = {SINGLE: "S", DOUBLE: "D"}
        return f"theta={code[self.theta]},phi={code[self.phi]},quant={code[self.quantisation]}"


def parse_policy(text: str) -> PrecisionPolicy:
    """Parse ``"theta=S,phi=D[,quant=S]"``; letters may be S/D or single/double."""
    fields = {"theta": SINGLE, "phi": DOUBLE, "quant": SINGLE}
    seen = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"bad policy component {part!r}")
        key, _, val = part.partition("=")
        key = key.strip().lower()
        val = val.strip().lower()
        if key not in fields or key in seen:
            raise ValueError(f"bad or repeated policy key {key!r}")
        if val in ("s", "single"):
            fields[key] = SINGLE
        elif val in ("d", "double"):
            fields[key] = DOUBLE
        else:
            raise ValueError(f"bad policy value {val!r}")
        seen.add(key)
    return PrecisionPolicy(fields["theta"], fields["phi"], fields["quant"])


DEFAULT_POLICY = PrecisionPolicy(SINGLE, DOUBLE, SINGLE)
ORACLE_POLICY = PrecisionPolicy(DOUBLE, DOUBLE, DOUBLE)
ALL_SINGLE_POLICY = PrecisionPolicy(SINGLE, SINGLE, SINGLE)
