"""Exception types shared across the package."""


class UnishiftError(ValueError):
    """Base class for all input-contract violations."""


class NotHermitian(UnishiftError):
    """A matrix required to be Hermitian is not, within tolerance."""


class NotUnitary(UnishiftError):
    """A matrix required to be unitary is not, within tolerance."""


class NoConvergence(UnishiftError):
    """The dense eigensolver exceeded its iteration budget."""


class DimensionMismatch(UnishiftError):
    """Operands of an operation do not share a common dimension."""


class PhaseTooClose(UnishiftError):
    """The rotation phase puts -e^{i*phase} too close to the spectrum."""


class BadWindow(UnishiftError):
    """The spectral window (-a, a] does not capture a seed vector."""


class ZeroHarmonic(UnishiftError):
    """The zeroth Fourier mode was requested where only nonzero modes make sense."""


class PathMismatch(UnishiftError):
    """U is not e^{iA} U0 within tolerance, so the pair is inconsistent."""


class OnUnitCircle(UnishiftError):
    """A resolvent point z was taken too close to the unit circle."""
