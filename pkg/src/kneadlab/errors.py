"""Exception hierarchy shared by all kneadlab modules."""


class KneadlabError(Exception):
    """Base class; the CLI maps these to exit code 1."""


class VerdictNegative(KneadlabError):
    """A computation finished but its verdict is negative (CLI exit code 2)."""


# families
class DomainError(KneadlabError):
    pass


class SideRequired(KneadlabError):
    pass


class NonDifferentiable(KneadlabError):
    pass


class DegenerateDeformation(KneadlabError):
    pass


class InvalidFamily(KneadlabError):
    pass


# kneading / orbits
class OrbitEscaped(KneadlabError):
    pass


class OrbitNotFinite(KneadlabError):
    pass


class TangentOrbit(KneadlabError):
    pass


class OrbitLeftDomain(KneadlabError):
    pass


# solvers
class NoRoot(KneadlabError):
    pass


class PeriodCollision(KneadlabError):
    pass


class NotRealized(KneadlabError):
    pass


class MonotonicityViolation(KneadlabError):
    pass


class Diverged(KneadlabError):
    pass


class SingularJacobian(KneadlabError):
    pass


class NoRootInBracket(KneadlabError):
    pass


# transversality / transfer
class WrongShape(KneadlabError):
    pass


class ZeroDeterminant(VerdictNegative):
    def __init__(self, quotient, msg=None):
        self.quotient = quotient
        super().__init__(msg or f"|det quotient| = {abs(quotient):.3e} below threshold")


class NoConvergence(KneadlabError):
    pass


# motions
class InjectivityLost(KneadlabError):
    pass


class BranchJump(KneadlabError):
    pass


class SingularLift(KneadlabError):
    pass


class TargetHitSingularValue(KneadlabError):
    pass


class DivergenceDetected(KneadlabError):
    pass


class HypothesisViolated(KneadlabError):
    pass


class GeometryFailed(VerdictNegative):
    pass


# piecewise linear
class InvalidValueVector(KneadlabError):
    pass
