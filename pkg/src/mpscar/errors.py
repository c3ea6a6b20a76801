"""Exception and warning types shared across the package."""


class MPScarError(Exception):
    """Base class for errors raised by this package."""


class ConfigurationError(MPScarError):
    """Invalid model label, parameter value, or size request."""


class DegenerateStateError(MPScarError):
    """The requested state vanishes identically (all trace amplitudes zero)."""


class TransitionPointError(MPScarError):
    """Dominant transfer eigenvalue is degenerate, so the thermodynamic limit
    is undefined; use a finite-chain correlation instead."""


class RankError(MPScarError):
    """The local subspace has unexpected rank and the orthogonal complement
    does not have the requested dimension."""


class SymmetryError(MPScarError):
    """An operator violates the symmetry required by the construction."""


class NumericalError(MPScarError):
    """A numerical routine failed to converge."""


class RankDeficiencyWarning(UserWarning):
    """The span of the local subspace states has rank below chi**2."""


class ContinuityLossWarning(UserWarning):
    """The Procrustes overlap matrix became singular; the basis chain was
    restarted at this coupling."""


class DegenerateScarWarning(UserWarning):
    """The embedded state overlaps no single eigenvector strongly; it was
    projected onto a (near-)degenerate eigenspace instead."""
