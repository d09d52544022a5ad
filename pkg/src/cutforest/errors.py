"""Exception hierarchy. The CLI maps each family onto an exit code."""


class CutforestError(Exception):
    exit_code = 3


class StructuralError(CutforestError, ValueError):
    """Input is malformed: unknown vertex, cut from another graph, bad JSON."""

    exit_code = 1


class PreconditionError(CutforestError, ValueError):
    exit_code = 1


class CapacityError(PreconditionError):
    """An enumeration guard was exceeded."""


class DomainError(PreconditionError):
    """An argument lies outside the domain of the operation."""


class OracleError(CutforestError):
    """A group oracle misbehaved (e.g. two normal forms for one element)."""

    exit_code = 3


class GenerationError(CutforestError):
    """Greedy generator extraction did not reach the full ring.

    ``uncovered`` lists the cuts the accepted system fails to generate.
    """

    exit_code = 3

    def __init__(self, msg, uncovered=()):
        super().__init__(msg)
        self.uncovered = list(uncovered)


class TruncationError(CutforestError):
    """The answer depends on the part of an infinite object outside the ball."""

    exit_code = 2

    def __init__(self, msg, lost=()):
        super().__init__(msg)
        self.lost = list(lost)


class InvariantError(CutforestError):
    exit_code = 3
