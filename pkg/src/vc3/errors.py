"""Exception types shared across the package."""


class Vc3Error(Exception):
    """Base class for all vc3 errors."""


class NonFiniteInput(Vc3Error, ValueError):
    """An input vector contains NaN or infinity."""


class EmptyDomain(Vc3Error, ValueError):
    """A study was requested over zero samples."""


class InvalidSplit(Vc3Error, ValueError):
    """A fractional split violates the joint-index capacity constraint."""


class DomainError(Vc3Error, ValueError):
    """A formula was evaluated outside its mathematical domain."""


class LengthMismatch(Vc3Error, ValueError):
    """Paired streams have different lengths."""


class StreamError(Vc3Error, ValueError):
    """Base class for stream file-format errors."""


class BadMagic(StreamError):
    """The stream file does not start with the expected magic bytes."""


class BadLayout(StreamError):
    """The stream header encodes an invalid bit layout."""


class TruncatedStream(StreamError):
    """The stream file ends before the declared word count."""
