"""Exception hierarchy shared by all solver modules."""


class SPNehariError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(SPNehariError, ValueError):
    """Invalid parameters, grid sizes or configuration values."""


class GridMismatch(SPNehariError, ValueError):
    """Two radial functions live on different grids."""


class NoProjection(SPNehariError):
    """The fibering map along a ray has no positive critical point."""


class NotOnManifold(SPNehariError):
    """A state expected to lie on the Nehari manifold does not."""


class NoConvergence(SPNehariError):
    """An iterative solve hit its iteration cap."""

    def __init__(self, msg, state=None, iterations=None):
        super().__init__(msg)
        self.state = state
        self.iterations = iterations


class BranchUnavailable(SPNehariError):
    """The requested scalar branch does not exist for these parameters."""


class InconsistentZ(SPNehariError):
    """Integral coordinates do not satisfy the solution identities."""


class SemitrivialCollapse(SPNehariError):
    """A two-component solve collapsed onto a single component."""

    def __init__(self, msg, outcome=None):
        super().__init__(msg)
        self.outcome = outcome


class OrderingViolation(SPNehariError):
    """The two computed solutions violate the expected energy ordering."""
