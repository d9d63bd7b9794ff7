"""Domain exceptions shared by the simulation modules.

Every error that maps to a physical or statistical failure mode gets its own
class so callers (and the CLI exit-code layer) can match on the name.
"""


class IselectError(Exception):
    """Base class for all domain errors raised by this package."""


class ResonantDetuning(IselectError):
    """An effective detuning fell inside the perturbative guard band.

    Second-order rates diverge when an intermediate level is driven on
    resonance; the guard keeps the model inside its domain of validity.
    """


class TruncationTooTight(IselectError):
    """A number-grid cutoff would drop more than the allowed Poisson mass."""


class DegenerateSelection(IselectError):
    """The selection-line denominator vanishes; no line n2(n1) exists."""


class ZeroVariance(IselectError):
    """The reference state has zero variance along the selection line."""


class NoSelection(IselectError):
    """No finite selected velocity exists for these parameters."""


class AllAtomsLost(IselectError):
    """Every Monte Carlo trajectory was lost before the final time."""


class AtResonance(IselectError):
    """A requested q value sits inside the guard band of a 1/q^2 - 1/n^2 pole."""


class NoSignChange(IselectError):
    """Bisection bracket does not straddle a zero of the Raman amplitude."""


class InsufficientEpisodes(IselectError):
    """Too few trapping episodes to fit a survival-function tail."""
