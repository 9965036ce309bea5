"""Exception types shared across the package.

The CLI maps these onto distinct exit codes: usage errors exit 2 (argparse),
data errors exit 3, numerical failures exit 4.
"""


class ShapeError(ValueError):
    """Tensor shapes or dimensions incompatible with an operation."""


class ConfigError(ValueError):
    """Invalid or inconsistent model/run configuration."""


class DataFormatError(ValueError):
    """Malformed input file (IDX, checkpoint, dump, config)."""


class NumericalFailure(RuntimeError):
    """Training produced NaN/Inf; carries a pointer to the last good state."""
