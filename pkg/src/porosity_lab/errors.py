"""Exception hierarchy shared by every module."""

from __future__ import annotations


class PorosityLabError(Exception):
    """Base class for all library errors."""


class ValidationError(PorosityLabError, ValueError):
    """A space, table or parameter violates its invariants."""


class SymmetryViolation(ValidationError):
    def __init__(self, pair, values=None):
        self.pair = tuple(pair)
        msg = f"distance table is not symmetric at pair {self.pair}"
        if values is not None:
            msg += f" ({values[0]!r} != {values[1]!r})"
        super().__init__(msg)


class DiagonalViolation(ValidationError):
    def __init__(self, pair, detail=""):
        self.pair = tuple(pair)
        super().__init__(f"diagonal/positivity violated at pair {self.pair}{': ' + detail if detail else ''}")


class TooFewPoints(ValidationError):
    pass


class IncompatiblePointSets(ValidationError):
    pass


class EmptyObstacleSet(ValidationError):
    pass


class SampleOnObstacle(ValidationError):
    pass


class NonPositiveRadius(ValidationError):
    pass


class ParamOutOfRange(ValidationError):
    pass


class GammaOutOfRange(ParamOutOfRange):
    pass


class SnowflakeOnNonMetric(ValidationError):
    pass


class DepthCapTooSmall(PorosityLabError):
    pass


class NoPositiveDenominators(PorosityLabError):
    pass


class NoQualifyingBalls(PorosityLabError):
    pass


class BallTooLarge(PorosityLabError):
    pass


class BallMissesE(PorosityLabError):
    pass


class NoAdmissibleEta(PorosityLabError):
    pass


class EmptyOmega(ValidationError):
    pass


class OmegaIsEverything(ValidationError):
    pass


class ParseError(PorosityLabError, ValueError):
    def __init__(self, message, *, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class ConfigError(PorosityLabError, ValueError):
    pass
