"""Exception hierarchy shared across the package."""


class FFSpinError(Exception):
    pass


class NotHermitian(FFSpinError, ValueError):
    pass


class NotPSD(FFSpinError, ValueError):
    pass


class DimensionMismatch(FFSpinError, ValueError):
    pass


class NotRescaled(FFSpinError, ValueError):
    pass


class NotApplicable(FFSpinError, ValueError):
    pass


class InvalidHamiltonian(FFSpinError, ValueError):
    pass


class RankMismatch(FFSpinError, ValueError):
    pass


class NoEntangledBasisVector(FFSpinError, ValueError):
    pass


class NoSuchTerm(FFSpinError, KeyError):
    pass


class ReductionLivelock(FFSpinError, RuntimeError):
    pass


class NotNatural(FFSpinError, ValueError):
    pass


class Inconsistent(FFSpinError, ValueError):
    pass


class DependentSeeds(FFSpinError, ValueError):
    pass


class GramSingular(FFSpinError, ValueError):
    pass


class FrustratedInput(FFSpinError, ValueError):
    pass


class ObservableTooLarge(FFSpinError, ValueError):
    pass


class FrustratedSubsystem(FFSpinError, ValueError):
    pass


class InvalidConstants(FFSpinError, ValueError):
    pass


class NotContiguous(FFSpinError, ValueError):
    pass


class InsufficientTrials(FFSpinError, ValueError):
    pass


class UnsupportedPerturbation(FFSpinError, ValueError):
    pass


class TooLarge(FFSpinError, ValueError):
    pass


class FrustratedH0(FrustratedInput):
    pass
