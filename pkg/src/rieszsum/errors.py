"""Exception types shared across the package."""


class NonConvergence(RuntimeError):
    """A series or quadrature failed to settle within its caps.

    ``best`` carries the most refined value obtained before giving up, and
    ``detail`` an optional dict of diagnostics.
    """

    def __init__(self, message, best=None, detail=None):
        super().__init__(message)
        self.best = best
        self.detail = detail or {}


class DegenerateGrid(ValueError):
    """Too many error samples vanish for a log-log fit to mean anything."""


class HypothesisError(ValueError):
    """Parameters violate the hypotheses of the identity being evaluated."""


class PoleError(ValueError):
    """Argument sits on a pole of a special function."""
