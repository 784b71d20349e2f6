"""Exception hierarchy shared by all spreadcode modules."""


class SpreadCodeError(Exception):
    """Base class for domain errors (CLI maps these to exit code 1)."""


class NotPrimitive(SpreadCodeError):
    pass


class DegreeMismatch(SpreadCodeError):
    pass


class WidthMismatch(SpreadCodeError):
    pass


class LogOfZero(SpreadCodeError):
    pass


class DivisibilityViolation(SpreadCodeError):
    pass


class FragmentLengthMismatch(SpreadCodeError):
    pass


class DimensionMismatch(SpreadCodeError):
    pass


class Unrecoverable(SpreadCodeError):
    def __init__(self, rank, needed):
        super().__init__(f"pieces span rank {rank} < {needed}")
        self.rank = rank
        self.needed = needed


class InconsistentPieces(SpreadCodeError):
    pass


class NodeUnavailable(SpreadCodeError):
    def __init__(self, missing):
        self.missing = sorted(missing)
        super().__init__(
            "fragments unavailable: " + ",".join(str(i + 1) for i in self.missing))


class InvalidNode(SpreadCodeError):
    pass


class AlphaUnsupported(SpreadCodeError):
    pass


class PairInsufficient(SpreadCodeError):
    pass


class InsufficientLiveNodes(SpreadCodeError):
    pass


class Infeasible(SpreadCodeError):
    def __init__(self, node):
        super().__init__(f"no live repair pair for N{node}")
        self.node = node


class BudgetExceeded(SpreadCodeError):
    pass


class ScenarioError(SpreadCodeError):
    pass
