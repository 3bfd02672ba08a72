"""Exception hierarchy shared by all numeric modules."""


class ZetalabError(Exception):
    """Base class for evaluation failures; CLI maps these to exit status 1."""


class PoleError(ZetalabError):
    """Evaluation requested at (or indistinguishably close to) a pole."""


class PrecisionExhaustedError(ZetalabError):
    """Retry budget spent without meeting the requested error target."""


class NearZeroError(ZetalabError):
    """Division by a value whose error bound covers zero."""


class DomainError(ZetalabError):
    """Arguments outside the documented validity region of an operation."""


class CapacityError(ZetalabError):
    """Requested table size exceeds the configured memory budget."""


class NonConvergenceError(ZetalabError):
    """Quadrature or node-doubling budget exhausted before the tolerance."""


class AmbiguousWindingError(ZetalabError):
    """Contour residue count too far from an integer to round."""


class ZeroOnContourError(ZetalabError):
    """The integrand's function has a zero too close to the contour."""


class OverrideError(ZetalabError):
    """Mutually inconsistent parameter overrides."""
