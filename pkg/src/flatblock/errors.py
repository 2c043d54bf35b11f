"""Exception hierarchy shared across flatblock."""


class FlatblockError(Exception):
    """Base class for every error raised by flatblock."""


class FieldMismatch(FlatblockError):
    pass


class ParseError(FlatblockError, ValueError):
    pass


# surface construction
class SurfaceError(FlatblockError):
    pass


class NonParallelGluing(SurfaceError):
    pass


class NonConvexFace(SurfaceError):
    pass


class Disconnected(SurfaceError):
    pass


class BadGluing(SurfaceError):
    pass


class UnknownBuiltin(SurfaceError):
    pass


class BadParams(FlatblockError, ValueError):
    pass


class NotTransitive(SurfaceError):
    pass


class DisconnectedCover(SurfaceError):
    pass


class NonPositiveDeterminant(FlatblockError):
    pass


class FieldInsufficient(FlatblockError):
    pass


class PointNotOnSurface(FlatblockError):
    pass


# tracing
class ZeroDirection(FlatblockError):
    pass


class SectorRequired(FlatblockError):
    pass


class BudgetTooLargeGuard(FlatblockError):
    pass


class NoSingularities(FlatblockError):
    pass


class BudgetExhausted(FlatblockError):
    pass


# blocking / holonomy / autos
class ContainsEndpoint(FlatblockError):
    pass


class NoCoverData(FlatblockError):
    pass


class DegenerateRank(FlatblockError):
    pass


class NotApplicable(FlatblockError):
    pass
