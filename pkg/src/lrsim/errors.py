"""Exception types shared across the library."""


class LrsimError(Exception):
    """Base class for all library errors."""


class DimensionCapError(LrsimError):
    """A dense computation would exceed the 12-qubit (4096-dim) cap."""


class NonHermitianError(LrsimError):
    """An operator that must be Hermitian is not, beyond tolerance."""


class InvalidCutError(LrsimError):
    """A block decomposition was requested with inconsistent cut indices."""


class BudgetInfeasibleError(LrsimError):
    """No block time can satisfy the requested error budget."""

    def __init__(self, message, limiting_value=None):
        super().__init__(message)
        self.limiting_value = limiting_value


class DegenerateDataError(LrsimError):
    """Fit input does not constrain the model (e.g. a single overlap size)."""


class SchemaError(LrsimError):
    """A JSON/CSV document does not match the declared schema."""
