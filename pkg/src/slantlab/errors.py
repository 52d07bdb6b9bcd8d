"""Exception hierarchy shared by every slantlab module."""


class SlantlabError(Exception):
    """Base class for all slantlab errors."""


class ParseError(SlantlabError):
    """Malformed expression or manifest text."""

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


class ExprSyntaxError(ParseError):
    pass


class UnknownIdentifier(ParseError):
    def __init__(self, name, offset=None):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", offset)


class DomainError(SlantlabError):
    """An expression was evaluated outside its domain (sqrt/log of a non-positive, x/0, ...)."""

    def __init__(self, message, subexpr=None):
        self.subexpr = subexpr
        if subexpr is not None:
            message = f"{message} in {subexpr}"
        super().__init__(message)


class ValidationError(SlantlabError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class PointOutsideChart(SlantlabError):
    pass


class WrongMetricModel(SlantlabError):
    pass


class NotLocallyProduct(SlantlabError):
    pass


class ImmersionDegenerate(SlantlabError):
    pass


class ClusterAmbiguity(SlantlabError):
    pass


class NotWellDefined(SlantlabError):
    pass


class HypothesisNotMet(SlantlabError):
    pass
