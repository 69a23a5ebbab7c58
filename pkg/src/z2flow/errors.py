"""Exception hierarchy for the z2flow toolkit."""


class Z2FlowError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(Z2FlowError):
    """Shape or dimension mismatch (odd dimension, rank mismatch, ...)."""


class SymmetryError(Z2FlowError):
    """A claimed symmetry (skew, symmetric, chiral, orthogonal) fails."""


class SingularError(Z2FlowError):
    """An operator required to be invertible is singular within tolerance."""


class WindowCollisionError(Z2FlowError):
    """A spectral window radius collides with a singular value."""


class TransportError(Z2FlowError):
    """Subspace transport is ill-conditioned (polar factor near singular)."""


class NotAdmissibleError(Z2FlowError):
    """A path fails the admissibility requirement at its endpoints."""


class RefinementError(Z2FlowError):
    """Adaptive refinement hit its resolution floor without succeeding."""


class StructureError(Z2FlowError):
    """Structural postcondition violated (signals invalid inputs)."""


class NotFredholmPairError(Z2FlowError):
    """A pair of complex structures fails the spectral-gap certificate."""


class ConfigError(Z2FlowError):
    """Invalid builder parameters, CLI flags or path-file schema."""
