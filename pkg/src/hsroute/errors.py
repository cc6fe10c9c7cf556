"""Exception types raised across the package."""


class RoutingError(Exception):
    """Base class for all errors raised by hsroute."""


class CoincidentPoints(RoutingError, ValueError):
    pass


class AntipodalPoints(RoutingError, ValueError):
    pass


class OutOfDomain(RoutingError):
    pass


class AllLandCell(RoutingError):
    pass


class PoleSingularity(RoutingError):
    pass


class IntegrationError(RoutingError):
    """A field error during integration; ``step`` is the failing RK4 step index."""

    def __init__(self, msg, step=None, cause=None):
        super().__init__(msg)
        self.step = step
        self.cause = cause


class AllTrajectoriesDead(RoutingError):
    pass


class RouteNotFound(RoutingError):
    """Alternation budget exhausted; ``route`` holds the best partial route."""

    def __init__(self, msg, route=None):
        super().__init__(msg)
        self.route = route


class CurrentExceedsSpeed(RoutingError):
    def __init__(self, msg, where=None):
        super().__init__(msg)
        self.where = where


class SingularHessian(RoutingError):
    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


class SmoothingError(RoutingError):
    """Wraps a sweep failure with the iteration at which it happened."""

    def __init__(self, msg, iteration, cause):
        super().__init__(msg)
        self.iteration = iteration
        self.cause = cause


class NonPositiveSpeed(RoutingError, ValueError):
    pass


class ConfigError(RoutingError, ValueError):
    pass


class ParseError(RoutingError, ValueError):
    pass


class ShapeMismatch(ParseError):
    pass


class NonMonotonicAxis(ParseError):
    pass


class LandStart(RoutingError):
    pass


class LandGoal(RoutingError):
    pass
