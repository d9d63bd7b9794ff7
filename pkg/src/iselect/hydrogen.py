"""Stimulated Raman coupling in hydrogen: np-ladder sums and antiresonances.

A two-photon Raman transition between the 1s hyperfine states goes through
the whole np ladder.  Each intermediate level contributes with weight
A_n = |<1s|r|np>|^2 and an energy denominator that changes sign across the
level, so the summed amplitude

    S(q) = sum_{n=2}^{n_max} A_n / (1/q^2 - 1/n^2)

alternates between -inf and +inf poles at integer q and crosses zero
exactly once between consecutive poles.  Those zeros are antiresonances:
laser frequencies where the Raman excitation switches off.  q is the
dimensionless frequency [Ry / (hbar * omega_1)]^(1/2) of the first photon,
so q -> n is one-photon resonance with the np level.

The excitation rate is Q(q) = Q0 * S(q)^2 with all n-independent angular
and hyperfine factors absorbed in Q0.  Atomic units for A_n (a0^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import AtResonance, NoSignChange

__all__ = [
    "RYDBERG_ENERGY_J",
    "RYDBERG_OMEGA",
    "HydrogenRamanParams",
    "RamanSpectrum",
    "dipole_weight",
    "raman_amplitude",
    "scan_raman_spectrum",
    "find_antiresonance",
    "excitation_rate_near_antiresonance",
]

RYDBERG_ENERGY_J = 2.2e-18  # binding energy scale used in the q <-> omega map
HBAR_JS = 1.054571817e-34
RYDBERG_OMEGA = RYDBERG_ENERGY_J / HBAR_JS  # rad/s


@dataclass
class HydrogenRamanParams:
    """Ladder truncation and numerical guards.

    n_max : highest np level kept in the sum (the tail falls off as n^-3).
    pole_guard : half-width of the exclusion band around each integer pole.
    q0 : overall rate prefactor Q0.
    bisect_tol : absolute q tolerance of the antiresonance bisection.
    """

    n_max: int = 100
    pole_guard: float = 1e-6
    q0: float = 1.0
    bisect_tol: float = 1e-12

    def __post_init__(self):
        if self.n_max < 2:
            raise ValueError("n_max must be at least 2")
        if not 0.0 < self.pole_guard < 0.5:
            raise ValueError("pole_guard must lie in (0, 0.5)")
        if self.q0 <= 0:
            raise ValueError("q0 must be positive")
        if not 0.0 < self.bisect_tol < 1e-3:
            raise ValueError("bisect_tol must lie in (0, 1e-3)")


def dipole_weight(n: int) -> float:
    """Squared radial dipole element |<1s|r|np>|^2 = 2^8 n^7 (n-1)^(2n-5) / (n+1)^(2n+5).

    Atomic units.  Evaluated in log space so large n neither overflows nor
    loses the n^-3 falloff (A_n * n^3 -> 2^8 e^-4 ~ 4.69).
    """
    if n != int(n) or n < 2:
        raise ValueError("n must be an integer >= 2")
    n = int(n)
    log_a = (
        8.0 * math.log(2.0)
        + 7.0 * math.log(n)
        + (2 * n - 5) * math.log(n - 1.0)
        - (2 * n + 5) * math.log(n + 1.0)
    )
    return math.exp(log_a)


@lru_cache(maxsize=None)
def _weights_upto(n_max: int) -> np.ndarray:
    """A_n for n = 2..n_max as an array (cached; index 0 is n = 2)."""
    return np.array([dipole_weight(n) for n in range(2, n_max + 1)])


def _check_guard(q: np.ndarray, p: HydrogenRamanParams):
    nearest = np.rint(q)
    on_pole = (np.abs(q - nearest) < p.pole_guard) & (nearest >= 2) & (nearest <= p.n_max)
    if np.any(on_pole):
        bad = float(np.asarray(q).ravel()[np.argmax(np.asarray(on_pole).ravel())])
        raise AtResonance(f"q = {bad:.9g} is within {p.pole_guard:g} of an np resonance")


def _amplitude_array(q: np.ndarray, p: HydrogenRamanParams) -> np.ndarray:
    weights = _weights_upto(p.n_max)
    n = np.arange(2, p.n_max + 1, dtype=float)
    inv_q2 = 1.0 / (np.asarray(q, dtype=float)[..., None] ** 2)
    return np.sum(weights / (inv_q2 - 1.0 / n**2), axis=-1)


def raman_amplitude(q: float, p: HydrogenRamanParams) -> float:
    """Summed Raman amplitude S(q) over the truncated np ladder.

    Requires q > 1 (below the first intermediate level there is no pole
    structure and the hyperfine Raman picture does not apply).

    Raises AtResonance when q falls inside the pole guard band of any level
    2 <= n <= n_max.
    """
    q_arr = np.asarray(q, dtype=float)
    if np.any(q_arr <= 1.0):
        raise ValueError("q must exceed 1")
    _check_guard(q_arr, p)
    out = _amplitude_array(q_arr, p)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass
class RamanSpectrum:
    """S and Q = Q0*S^2 on a q grid; guarded points flagged and set to NaN."""

    q_values: np.ndarray
    amplitudes: np.ndarray
    rates: np.ndarray
    resonant: np.ndarray  # bool: inside a pole guard band


def scan_raman_spectrum(q_values, p: HydrogenRamanParams) -> RamanSpectrum:
    """Vectorized S(q), Q(q) over a grid, masking guarded points as NaN."""
    q = np.asarray(q_values, dtype=float)
    if np.any(q <= 1.0):
        raise ValueError("q must exceed 1 everywhere on the scan grid")
    nearest = np.rint(q)
    resonant = (np.abs(q - nearest) < p.pole_guard) & (nearest >= 2) & (nearest <= p.n_max)
    s = np.full(q.shape, np.nan)
    ok = ~resonant
    if np.any(ok):
        s[ok] = _amplitude_array(q[ok], p)
    return RamanSpectrum(q_values=q, amplitudes=s, rates=p.q0 * s * s, resonant=resonant)


def find_antiresonance(n_low: int, p: HydrogenRamanParams) -> float:
    """Zero of S(q) between the poles at n_low and n_low + 1, by bisection.

    S is strictly increasing between consecutive poles (every term of dS/dq
    is positive), so the zero is unique when it exists.  The bracket ends
    two pole_guards inside each pole: one guard is not enough, because
    n_low + pole_guard can round to a float whose distance to n_low is a
    hair under pole_guard, which the guard check would then reject.

    Raises NoSignChange when the bracket does not straddle a zero -- e.g.
    n_low + 1 exceeds n_max, so there is no pole above and S keeps one sign.
    """
    n_low = int(n_low)
    if n_low < 2:
        raise ValueError("n_low must be at least 2")
    lo = n_low + 2.0 * p.pole_guard
    hi = n_low + 1.0 - 2.0 * p.pole_guard
    if lo >= hi:
        raise ValueError("pole_guard too wide for a unit bracket")
    f_lo = raman_amplitude(lo, p)
    f_hi = raman_amplitude(hi, p)
    if not (f_lo < 0.0 < f_hi or f_hi < 0.0 < f_lo):
        raise NoSignChange(
            f"S has the same sign at both ends of ({lo:.6f}, {hi:.6f}); "
            "no antiresonance in this interval"
        )
    while hi - lo > p.bisect_tol:
        mid = 0.5 * (lo + hi)
        f_mid = _amplitude_array(np.asarray(mid), p)
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def excitation_rate_near_antiresonance(
    q_star: float,
    v,
    k_eff: float,
    omega_scale: float,
    p: HydrogenRamanParams,
):
    """Raman rate seen by an atom moving at v, with lasers tuned to q_star.

    The Doppler effect shifts the first photon to omega_1(v) = omega_1 +
    k_eff*v, and q maps to frequency through q = (omega_scale / omega_1)^(1/2)
    with omega_scale = Ry/hbar (RYDBERG_OMEGA for the physical atom).  At
    v = 0 the rate is the tuned antiresonance value (zero up to roundoff);
    for small v it grows quadratically, which is what makes the
    antiresonance a velocity-selective dark point.

    q_star must be a validated antiresonance (from find_antiresonance).
    Raises AtResonance if the Doppler-shifted q of some v enters a pole
    guard band.
    """
    if omega_scale <= 0:
        raise ValueError("omega_scale must be positive")
    if q_star <= 1:
        raise ValueError("q_star must exceed 1")
    omega_1 = omega_scale / (q_star * q_star)
    omega_v = omega_1 + k_eff * np.asarray(v, dtype=float)
    if np.any(omega_v <= 0):
        raise ValueError("Doppler-shifted frequency must stay positive")
    q_v = np.sqrt(omega_scale / omega_v)
    s = raman_amplitude(q_v, p)
    out = p.q0 * np.asarray(s) ** 2
    if out.ndim == 0:
        return float(out)
    return out
