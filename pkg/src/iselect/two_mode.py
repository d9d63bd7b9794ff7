"""Joint two-mode number grid and interference-induced number selection.

The atom sits in two quantized field modes.  Expanding the joint field
state on number states |n1, n2> with amplitudes a(n1, n2), each component
is depleted at its own two-photon rate W(n1, n2): after an interaction time
t the surviving ground-state amplitude is a(n1, n2) * exp(-W(n1, n2) * t).
Because W vanishes on the light-shift selection line

    n2 = alpha * n1 + mu,

components on the line survive untouched while the rest decay: the
measurement "no transition happened" filters the field toward a correlated
two-mode state.  The degree of selection is tracked by the variance of
delta_n = n2 - (alpha * n1 + mu) over the conditional (post-selected)
distribution, expressed in dB relative to the initial variance.

Grid convention: axis 0 of the amplitude array is n1, axis 1 is n2.
Times are in units of the inverse depletion-rate scale of the chosen
parameters (the rate prefactor |a_i|^2 is absorbed in the amplitudes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .diamond import DiamondParams, transition_rate
from .errors import DegenerateSelection, TruncationTooTight, ZeroVariance

__all__ = [
    "JointModeState",
    "SelectionLine",
    "coherent_joint_state",
    "selection_line",
    "evolve",
    "ground_population",
    "degree_of_coherence",
    "coherence_series",
]

# Tolerated Poisson mass beyond each mode's cutoff.
TRUNCATION_TAIL = 1e-3
_NORM_SLACK = 1e-9


@dataclass
class JointModeState:
    """Amplitudes a(n1, n2) on a truncated joint number grid, plus time.

    amplitudes[n1, n2] is the ground-state amplitude of the |n1, n2> field
    component.  The squared norm is the ground-state population; it starts
    at 1 (up to truncation) and only decreases.  Instances are treated as
    immutable; evolve returns a new state.
    """

    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes)
        if self.amplitudes.ndim != 2:
            raise ValueError("amplitudes must be a 2-D array indexed [n1, n2]")
        norm = float(np.sum(np.abs(self.amplitudes) ** 2))
        if not 0.0 < norm <= 1.0 + _NORM_SLACK:
            raise ValueError(f"squared norm must lie in (0, 1], got {norm:g}")

    @property
    def nmax1(self) -> int:
        return self.amplitudes.shape[0] - 1

    @property
    def nmax2(self) -> int:
        return self.amplitudes.shape[1] - 1


@dataclass(frozen=True)
class SelectionLine:
    """Dark line n2 = alpha * n1 + mu of the two-photon rate."""

    alpha: float
    mu: float

    def delta_n(self, n1, n2):
        """Signed distance of (n1, n2) from the line, measured along n2."""
        return np.asarray(n2, dtype=float) - (self.alpha * np.asarray(n1, dtype=float) + self.mu)


def _poisson_amplitudes(nbar: float, nmax: int) -> np.ndarray:
    """Real non-negative coherent-state amplitudes c(n) = sqrt(Poisson pmf)."""
    if nbar < 0:
        raise ValueError("mean photon number must be non-negative")
    n = np.arange(nmax + 1)
    if nbar == 0.0:
        c = np.zeros(nmax + 1)
        c[0] = 1.0
        return c
    log_pmf = -nbar + n * math.log(nbar) - special.gammaln(n + 1.0)
    return np.exp(0.5 * log_pmf)


def default_nmax(nbar: float) -> int:
    """Grid cutoff nbar + 10*sqrt(nbar) + 10, generous enough for ~1e-16 tails."""
    return math.ceil(nbar + 10.0 * math.sqrt(nbar) + 10.0)


def coherent_joint_state(
    nbar1: float,
    nbar2: float,
    nmax1: int | None = None,
    nmax2: int | None = None,
) -> JointModeState:
    """Product of two coherent states on a truncated grid, at time 0.

    Amplitudes are real non-negative, c(n1)*c(n2) with |c(n)|^2 the Poisson
    distribution of mean nbar_i.  Cutoffs default to default_nmax(nbar_i).

    Raises TruncationTooTight if either mode would lose 1e-3 or more of its
    Poisson mass beyond the cutoff.
    """
    if nmax1 is None:
        nmax1 = default_nmax(nbar1)
    if nmax2 is None:
        nmax2 = default_nmax(nbar2)
    for name, nbar, nmax in (("mode 1", nbar1, nmax1), ("mode 2", nbar2, nmax2)):
        tail = float(stats.poisson.sf(nmax, nbar)) if nbar > 0 else 0.0
        if tail >= TRUNCATION_TAIL:
            raise TruncationTooTight(
                f"{name}: Poisson mass {tail:.3e} beyond nmax={nmax} (limit {TRUNCATION_TAIL:g})"
            )
    a = np.outer(_poisson_amplitudes(nbar1, nmax1), _poisson_amplitudes(nbar2, nmax2))
    return JointModeState(amplitudes=a, time=0.0)


def selection_line(p: DiamondParams) -> SelectionLine:
    """Light-shift selection line of the destructive-interference condition.

    Collecting the n1 and n2 terms of a1*d2' + a2*d1' = 0 at v = 0 gives

        alpha = -(a1*b21 + a2*b11) / (a1*b22 + a2*b12)
        mu    = -(a1*delta2 + a2*delta1) / (a1*b22 + a2*b12)

    Raises DegenerateSelection when the common denominator (the n2
    coefficient of the residual) vanishes: no line of the form n2(n1)
    exists, e.g. with all shifts zero.
    """
    b = p.beta
    den = p.a1 * b[1, 1] + p.a2 * b[0, 1]
    if den == 0.0:
        raise DegenerateSelection("selection-line denominator a1*b22 + a2*b12 vanishes")
    alpha = -(p.a1 * b[1, 0] + p.a2 * b[0, 0]) / den
    mu = -(p.a1 * p.delta2 + p.a2 * p.delta1) / den
    # noisier parameter sets can produce -0.0 here; report plain zeros
    return SelectionLine(alpha=alpha + 0.0, mu=mu + 0.0)


def _rate_grid(p: DiamondParams, nmax1: int, nmax2: int) -> np.ndarray:
    n1 = np.arange(nmax1 + 1, dtype=float)[:, None]
    n2 = np.arange(nmax2 + 1, dtype=float)[None, :]
    return transition_rate(p, n1, n2, 0.0)


def evolve(s: JointModeState, p: DiamondParams, dt: float) -> JointModeState:
    """Deplete each number component for a time dt (atom at rest, v = 0).

    a(n1, n2) -> a(n1, n2) * exp(-W(n1, n2) * dt).  The evolution is exactly
    diagonal in (n1, n2), so successive calls compose exactly and a single
    call with the total time gives the same state.

    Raises ResonantDetuning (propagated) if any populated cell of the grid
    sits inside the detuning guard band.
    """
    if dt < 0:
        raise ValueError("dt must be non-negative")
    w = _rate_grid(p, s.nmax1, s.nmax2)
    return JointModeState(amplitudes=s.amplitudes * np.exp(-w * dt), time=s.time + dt)


def ground_population(s: JointModeState) -> float:
    """Probability that the atom has not left the ground state: sum |a|^2."""
    return float(np.sum(np.abs(s.amplitudes) ** 2))


def _line_variance(s: JointModeState, line: SelectionLine) -> float:
    """Variance of delta_n over the conditional distribution |a|^2 / sum."""
    w = np.abs(s.amplitudes) ** 2
    total = float(np.sum(w))
    n1 = np.arange(s.nmax1 + 1, dtype=float)[:, None]
    n2 = np.arange(s.nmax2 + 1, dtype=float)[None, :]
    dn = line.delta_n(n1, n2)
    mean = float(np.sum(w * dn)) / total
    return float(np.sum(w * (dn - mean) ** 2)) / total


def degree_of_coherence(s: JointModeState, line: SelectionLine, s0: JointModeState) -> float:
    """Selection depth R = 10*log10(Var_s(delta_n) / Var_s0(delta_n)), in dB.

    delta_n = n2 - (alpha*n1 + mu); both variances are taken over the
    conditional distribution |a|^2 normalized on the surviving population.
    s0 is the reference (initial-time) state of the same run.  Complete
    selection (zero residual variance) returns -inf.

    Raises ZeroVariance if the reference state has no variance along the
    line (e.g. a single number component).
    """
    var0 = _line_variance(s0, line)
    if var0 <= 0.0:
        raise ZeroVariance("reference state has zero variance along the selection line")
    var = _line_variance(s, line)
    if var == 0.0:
        return float("-inf")
    return 10.0 * math.log10(var / var0)


def coherence_series(
    p: DiamondParams,
    nbar1: float,
    nbar2: float,
    times: np.ndarray,
    nmax1: int | None = None,
    nmax2: int | None = None,
):
    """R(t) and ground population along a sample-time grid.

    The reference state for R is the state at times[0] (the start of the
    recorded series), so the first row is exactly 0 dB.  Returns
    (line, R_dB array, ground_population array, final JointModeState).
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-D array")
    if np.any(np.diff(times) <= 0) or times[0] < 0:
        raise ValueError("times must be non-negative and strictly increasing")
    line = selection_line(p)
    init = coherent_joint_state(nbar1, nbar2, nmax1, nmax2)
    s0 = evolve(init, p, float(times[0]))
    r_db = np.empty(times.size)
    pop = np.empty(times.size)
    state = s0
    for i, t in enumerate(times):
        state = evolve(init, p, float(t))
        r_db[i] = degree_of_coherence(state, line, s0)
        pop[i] = ground_population(state)
    return line, r_db, pop, state
