"""Exception hierarchy shared across the library.

The CLI maps these onto exit codes: configuration and input-file problems
exit 1, numerical failures exit 2.
"""


class ScatGPError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InvalidConfigError(ScatGPError):
    """A configuration object violates its invariants."""


class SizeMismatchError(ScatGPError):
    """Array shapes are inconsistent with the operation's contract."""


class NonFiniteInputError(ScatGPError):
    """Input contains NaN or infinity."""


class ManifestError(ScatGPError):
    """A dataset manifest is malformed; message carries the line number."""


class CacheFormatError(ScatGPError):
    """A feature-cache file is malformed or truncated."""


class ChecksumMismatchError(CacheFormatError):
    """Feature-cache body does not match its footer checksum."""

    exit_code = 2


class DigestMismatchError(CacheFormatError):
    """Feature cache was written under a different scattering config."""


class CholeskyError(ScatGPError):
    """Cholesky factorization failed even after jitter escalation."""

    exit_code = 2


class FrameBoundError(ScatGPError):
    """Filter bank violates the Littlewood-Paley frame invariants."""

    exit_code = 2


class PoolExhaustedError(ScatGPError):
    """Bayesian-optimization loop ran out of unobserved candidates."""
