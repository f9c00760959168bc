"""Exception hierarchy shared by all scatlab modules."""


class ScatLabError(Exception):
    """Base class for all scatlab errors."""


class GridMismatch(ScatLabError):
    """Two objects live on different grids."""


class NyquistOverflow(ScatLabError):
    """A spectral coefficient would be mapped outside the frequency lattice."""


class NonIntegerFactor(ScatLabError):
    """Dilation factor is neither an integer nor a reciprocal integer."""


class InvalidShell(ScatLabError):
    """Annulus bounds violate 0 < r < R."""


class DomainError(ScatLabError):
    """Parameter outside its mathematical domain."""


class EmptySupport(ScatLabError):
    """Filter spectrum has no nonzero lattice point."""


class MissingMetadata(ScatLabError):
    """Operation needs annulus/cone metadata the filter does not carry."""


class UnknownLabel(ScatLabError):
    """Filter label not present in the bank."""


class NonUnitLP(ScatLabError):
    """Squared filter sum exceeds 1 somewhere it must not."""


class CoverageGap(ScatLabError):
    """Translated windows fail to tile the requested frequency range."""


class DepthTooLarge(ScatLabError):
    """Unpruned tree would exceed the configured node budget."""


class DepthExceeded(ScatLabError):
    """Requested layer index beyond the profile depth."""


class InconsistentTree(ScatLabError):
    """Tree violates the layer-wise energy bookkeeping."""


class NotNonincreasing(ScatLabError):
    """Decay sequence must be nonincreasing."""


class GridExhausted(ScatLabError):
    """Nyquist headroom ran out before the construction finished."""


class TargetUnreachable(ScatLabError):
    """Energy target cannot be met on this grid/bank."""

    def __init__(self, message, achievable=None):
        super().__init__(message)
        self.achievable = achievable


class DisjointnessViolation(ScatLabError):
    """Filter blocks overlap although disjointness was required."""


class NotNondecreasing(ScatLabError):
    """Weight function fails monotonicity."""


class WeightNotStrong(ScatLabError):
    """Weight is not strongly dominated; explicit certificate unavailable."""


class InvalidConstant(ScatLabError):
    """Kernel-bound constant not valid for the requested depth range."""


class NotUFC(ScatLabError):
    """Bank does not carry a uniform-frequency-concentration structure tag."""


class SupportViolation(ScatLabError):
    """Mother spectrum leaves its declared annulus/cone region."""
