"""vc3: fixed-rate lossy compression of float32 3-vectors into 64-bit words."""

from .codec import (
    SphericalTriple,
    compress,
    compress_one,
    decode_magnitude,
    decompress,
    decompress_one,
    dequantize_angles,
    encode_magnitude,
    magnitude_event_counts,
    nint,
    predict_error,
    quantize_angles,
    to_spherical,
    to_spherical_one,
)
from .errors import (
    BadLayout,
    BadMagic,
    DomainError,
    EmptyDomain,
    InvalidSplit,
    LengthMismatch,
    NonFiniteInput,
    StreamError,
    TruncatedStream,
    Vc3Error,
)
from .layout import (
    ALL_SINGLE_POLICY,
    DEFAULT_LAYOUT,
    DEFAULT_POLICY,
    LAYOUT_16_17,
    LAYOUT_17_17,
    LAYOUT_17_18,
    LAYOUT_BASE_16_16,
    ORACLE_POLICY,
    BitLayout,
    PrecisionPolicy,
    parse_layout,
    parse_policy,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
