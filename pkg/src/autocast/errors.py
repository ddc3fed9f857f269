"""Exception types shared across the package.

Everything that stems from bad user input derives from AutocastError so the
CLI can map it to exit code 1; anything else is treated as an internal error.
"""


class AutocastError(Exception):
    """Base class for errors caused by invalid input or configuration."""


class IngestError(AutocastError):
    """Raised when sales records cannot be parsed or aggregated."""


class ConfigError(AutocastError):
    """Raised when a pipeline configuration file or value is invalid."""


class SynthSpecError(AutocastError):
    """Raised when a synthetic-corpus spec is malformed."""


class ExportError(AutocastError):
    """Raised when result files cannot be written or read back."""


class EvaluationError(AutocastError):
    """Raised when an evaluation cannot be computed from the given inputs."""


class DegenerateSampleError(EvaluationError):
    """Raised when a paired test is handed a sample with no usable differences."""
