"""Exception hierarchy.

Every error raised by the package derives from :class:`Rp2EndsError`.
``ConfigError`` covers bad user input; everything else is a numerical or
precondition failure. The CLI maps these to exit codes 2 and 3.
"""


class Rp2EndsError(Exception):
    exit_code = 3


class ConfigError(Rp2EndsError):
    exit_code = 2


class ParseError(ConfigError):
    pass


class PreconditionError(Rp2EndsError):
    pass


# projective linear algebra
class ZeroVector(Rp2EndsError):
    pass


class NonUnimodular(PreconditionError):
    pass


class NonPositiveSpectrum(Rp2EndsError):
    pass


class NumericallyAmbiguous(Rp2EndsError):
    pass


class NotHyperbolic(PreconditionError):
    pass


class UnsupportedHolonomy(Rp2EndsError):
    """Repeated eigenvalue with a Jordan type outside the three end classes."""


# residues
class ZeroResidue(PreconditionError):
    pass


class InvalidSpectrum(PreconditionError):
    pass


# metrics and differentials
class DomainError(PreconditionError):
    pass


class ZeroPoint(DomainError):
    pass


class ZeroOnRing(PreconditionError):
    pass


class BadRadii(PreconditionError):
    pass


class OutsideCollar(DomainError):
    pass


class NeckTooWide(PreconditionError):
    pass


# Wang solver
class UnpopulatedField(PreconditionError):
    pass


class BarrierFailure(Rp2EndsError):
    pass


class NewtonDivergence(Rp2EndsError):
    pass


class BracketsViolated(Rp2EndsError):
    pass


# developing map
class StepTooLarge(PreconditionError):
    pass


class FieldDomainError(DomainError):
    pass


class NoConvergenceByYmax(Rp2EndsError):
    pass


class InconsistentWitness(Rp2EndsError):
    pass


# Levinson iteration
class NonIntegrablePerturbation(Rp2EndsError):
    pass


class IterationStall(Rp2EndsError):
    pass


# degeneration
class DecayHypothesisViolated(PreconditionError):
    pass
