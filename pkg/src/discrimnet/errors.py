"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input fails a structural requirement (not a POVM, not a density matrix, ...)."""


class ConditioningError(ValueError):
    """Conditioning on an outcome of zero probability."""


class DegenerateEnsembleError(ValueError):
    """Ensemble members that should be distinct are identical within tolerance."""


class MdiRequiredError(RuntimeError):
    """A trusted-probe result is needed to decide between conjugate states."""


class UncertifiedDevicesError(RuntimeError):
    """Discrimination was attempted with devices that failed certification."""


class InconclusiveError(RuntimeError):
    """Statistics are too noisy to decide at the configured confidence margin."""


class ResourceLimitError(RuntimeError):
    """Requested system size exceeds the configured simulation cap."""
