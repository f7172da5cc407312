"""Exception types raised by the planner.

Every error carries a short ``code`` token; the command-line front end prints
it on stderr so failures can be grepped for.
"""


class PlannerError(ValueError):
    code = "E_PLANNER"


class DegenerateInput(PlannerError):
    code = "E_DEGENERATE_INPUT"


class TooFewPoints(DegenerateInput):
    code = "E_TOO_FEW_POINTS"


class DuplicatePoint(PlannerError):
    code = "E_DUPLICATE_POINT"


class OutsideHull(PlannerError):
    code = "E_OUTSIDE_HULL"


class DegenerateTriangle(PlannerError):
    code = "E_DEGENERATE_TRIANGLE"


class EmptyIntersection(PlannerError):
    code = "E_EMPTY_INTERSECTION"


class SingularPoint(PlannerError):
    code = "E_SINGULAR_POINT"


class BadIndex(PlannerError, IndexError):
    code = "E_BAD_INDEX"


class EmptySet(PlannerError):
    code = "E_EMPTY_SET"


class NoDescent(PlannerError):
    code = "E_NO_DESCENT"


class MismatchedConfig(PlannerError):
    code = "E_MISMATCHED_CONFIG"


class InvalidSpec(PlannerError):
    code = "E_INVALID_SPEC"


class ConfigError(PlannerError):
    """Unparseable or unknown configuration input."""

    code = "E_CONFIG"


class InvalidParameter(PlannerError):
    code = "E_INVALID_PARAMETER"
