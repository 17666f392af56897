"""Exception types shared across the package."""


class NullconeLabError(Exception):
    """Base class for all package errors."""


class NotLorentzianError(NullconeLabError):
    """Metric does not have signature (-,+,+,+) at the requested point."""


class DegenerateSlicingError(NullconeLabError):
    """The constant-time slicing degenerates: n^2 - |v|^2_h <= 0."""


class EllipticityError(NullconeLabError):
    """Induced spatial metric violates the configured uniform-ellipticity bound."""


class UnderResolvedError(NullconeLabError):
    """Grid Nyquist is too low for the requested frequency cutoff."""


class DomainError(NullconeLabError):
    """Requested sample lies outside the provider's domain."""


class SectionUnavailableError(NullconeLabError):
    """Requested time section is beyond the realized (caustic-free) range."""


class StencilUnavailableError(NullconeLabError):
    """A finite-difference stencil cannot be formed from the stored samples."""


class HodgeCompatibilityError(NullconeLabError):
    """Hodge system source data has a nonzero mean on a closed surface."""


class FrameDegenerateError(NullconeLabError):
    """Tangent frame became degenerate along a generator."""


class ConfigError(NullconeLabError):
    """Scenario configuration is malformed or contains unknown keys."""
