"""Exception types shared across the package.

The CLI maps these onto exit codes: input/validation problems exit 2,
everything else that goes wrong at runtime exits 3.
"""


class DLFusionError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(DLFusionError):
    """A document is structurally malformed (wrong/missing/unknown keys or types)."""


class ValidationError(DLFusionError):
    """A structurally well-formed document violates a semantic invariant."""


class EmptyNetworkError(ValidationError):
    """A network has no layers, or no compute (conv/fc) layer at all."""


class NotComputeLayerError(DLFusionError):
    """A compute-only operation was applied to an attached (zero-op) layer."""


class DomainError(DLFusionError):
    """A numeric argument is outside the function's domain (e.g. log of zero ops)."""


class NonPowerOfTwoError(DLFusionError):
    """A parallelism degree that cannot be laid out as a tile grid (mp < 1)."""


class UnsupportedStrideError(DLFusionError):
    """Reserved: raised only if exact strided halo propagation is disabled."""


class CoverageError(ValidationError):
    """Schedule blocks do not partition the network's layers in order."""


class NoComputeLayerError(ValidationError):
    """Fusion partitioning was asked for on a net with no compute layer."""


class InvalidStrategyError(ValidationError):
    """Unknown strategy number/name."""


class DegenerateDataError(DLFusionError):
    """Calibration data is rank-deficient (features carry no usable variation)."""


class InsufficientDataError(DLFusionError):
    """Too few calibration records to fit the model."""


class SpaceTooLargeError(DLFusionError):
    """The exhaustive search space exceeds the configured candidate cap."""


class EmptySweepError(DLFusionError):
    """A microbenchmark sweep was empty after filtering invalid combinations."""


class TemplateError(DLFusionError):
    """A code template references a placeholder that was not provided."""


class ExistsError(DLFusionError):
    """Output directory already has files and --force was not given."""


class IoError(DLFusionError):
    """Filesystem writes failed while emitting generated sources."""


class ConfigError(ValidationError):
    """A cost-model config file has unknown keys or out-of-range values."""
