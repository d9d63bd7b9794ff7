"""Two-photon "diamond" scheme: effective detunings and interference.

Four levels, two excitation paths.  A ground state |g> couples to a final
state |s> through two intermediate levels |e1>, |e2>, one photon from mode 1
and one from mode 2 being absorbed in either order.  To second order in
perturbation theory (hbar = 1) the two paths interfere and the two-photon
transition rate is

    W = n1 * n2 * |a1/d1' + a2/d2'|^2

where d_i' are the effective one-photon detunings, dressed by light shifts
and by the Doppler effect.  The rate vanishes exactly where the two path
amplitudes cancel, a1*d2' + a2*d1' = 0, and that cancellation locus is what
every other module in this package exploits.

Conventions
-----------
Mode i has photon number n_i; beta[i][j] is the light shift of path i+1 per
photon in mode j+1.  The two beams counterpropagate, so the Doppler term
enters the two paths with opposite signs: path 1 sees -k*v, path 2 sees
+k*v.  With that sign choice the selected velocity of the velocity module
comes out as v0 = (a1*d2 + a2*d1)/((a2 - a1)*k).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ResonantDetuning

__all__ = [
    "DiamondParams",
    "effective_detuning",
    "interference_residual",
    "transition_rate",
]


@dataclass
class DiamondParams:
    """Static parameters of the diamond scheme.

    a1, a2 : two-photon path amplitudes (product of the two dipole couplings
        of the path, divided by nothing -- the intermediate detuning is kept
        explicit in the rate formula).
    delta1, delta2 : bare one-photon detunings of the two intermediate levels.
    beta : 2x2 light-shift matrix; beta[i, j] multiplies n_{j+1} in the
        effective detuning of path i+1.
    k : magnitude of the photon wavevector (counterpropagating beams).
    detuning_floor : guard band below which an effective detuning is treated
        as resonant.  None resolves to 1e-9 * max(|delta1|, |delta2|, 1).

    Treat instances as immutable once constructed; they are shared read-only
    by the grid and Monte Carlo code.
    """

    a1: float
    a2: float
    delta1: float
    delta2: float
    beta: np.ndarray = field(default_factory=lambda: np.zeros((2, 2)))
    k: float = 0.0
    detuning_floor: float | None = None

    def __post_init__(self):
        self.beta = np.asarray(self.beta, dtype=float)
        if self.beta.shape == (4,):
            self.beta = self.beta.reshape(2, 2)
        if self.beta.shape != (2, 2):
            raise ValueError("beta must be a 2x2 matrix (or row-major 4-array)")
        if self.a1 == 0.0 and self.a2 == 0.0:
            raise ValueError("at least one path amplitude must be nonzero")
        if self.detuning_floor is None:
            self.detuning_floor = 1e-9 * max(abs(self.delta1), abs(self.delta2), 1.0)
        if not self.detuning_floor > 0.0:
            raise ValueError("detuning_floor must be positive")

    def to_dict(self) -> dict:
        """JSON-friendly dict; beta flattened row-major."""
        return {
            "a1": self.a1,
            "a2": self.a2,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "beta": [float(x) for x in self.beta.ravel()],
            "k": self.k,
            "detuning_floor": self.detuning_floor,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DiamondParams":
        known = {"a1", "a2", "delta1", "delta2", "beta", "k", "detuning_floor"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown DiamondParams key: {sorted(unknown)[0]}")
        return cls(
            a1=float(d["a1"]),
            a2=float(d["a2"]),
            delta1=float(d["delta1"]),
            delta2=float(d["delta2"]),
            beta=np.asarray(d.get("beta", np.zeros(4)), dtype=float),
            k=float(d.get("k", 0.0)),
            detuning_floor=d.get("detuning_floor"),
        )


def effective_detuning(p: DiamondParams, path: int, n1, n2, v=0.0):
    """Effective one-photon detuning of one path, dressed by shifts.

        d_i' = delta_i + (beta_i1*n1 + beta_i2*n2) + s_i*k*v,   s_1 = -1, s_2 = +1

    n1, n2, v may be scalars or broadcastable arrays.  The light-shift sum is
    grouped before the bare detuning is added so that configurations with a
    symmetric shift matrix give bitwise-identical d1' and d2' on the
    cancellation locus (the dark line stays exactly dark in floating point).
    """
    if path not in (1, 2):
        raise ValueError("path must be 1 or 2")
    i = path - 1
    shift = p.beta[i, 0] * np.asarray(n1, dtype=float) + p.beta[i, 1] * np.asarray(n2, dtype=float)
    delta = p.delta1 if path == 1 else p.delta2
    sign = -1.0 if path == 1 else 1.0
    out = (delta + shift) + sign * (p.k * np.asarray(v, dtype=float))
    if np.ndim(out) == 0:
        return float(out)
    return out


def interference_residual(p: DiamondParams, n1, n2, v=0.0):
    """a1*d2' + a2*d1': zero exactly on the destructive-interference locus.

    This is the numerator of the combined two-path amplitude; the transition
    rate factors as W = n1*n2*residual^2/(d1'*d2')^2, so residual = 0 and
    W = 0 pick out the same (n1, n2, v) set wherever W is defined.
    """
    d1p = effective_detuning(p, 1, n1, n2, v)
    d2p = effective_detuning(p, 2, n1, n2, v)
    out = p.a1 * np.asarray(d2p) + p.a2 * np.asarray(d1p)
    if np.ndim(out) == 0:
        return float(out)
    return out


def transition_rate(p: DiamondParams, n1, n2, v=0.0):
    """Second-order two-photon rate W = n1*n2*|a1/d1' + a2/d2'|^2.

    Accepts scalars or broadcastable arrays of photon numbers and velocity.
    Cells with n1*n2 = 0 have W = 0 regardless of the detunings (no photon
    pair to absorb), so the resonance guard is only enforced where the rate
    actually divides by the detunings.

    Raises ResonantDetuning if any cell with n1*n2 > 0 has |d_i'| below
    p.detuning_floor.
    """
    n1 = np.asarray(n1, dtype=float)
    n2 = np.asarray(n2, dtype=float)
    if np.any(n1 < 0) or np.any(n2 < 0):
        raise ValueError("photon numbers must be non-negative")
    d1p = np.asarray(effective_detuning(p, 1, n1, n2, v))
    d2p = np.asarray(effective_detuning(p, 2, n1, n2, v))
    populated = (n1 * n2) > 0
    too_close = (np.abs(d1p) < p.detuning_floor) | (np.abs(d2p) < p.detuning_floor)
    if np.any(populated & too_close):
        raise ResonantDetuning(
            f"effective detuning within {p.detuning_floor:g} of resonance on a populated cell"
        )
    # Guarded divisions: unpopulated resonant cells contribute 0, not inf.
    safe1 = np.where(too_close, 1.0, d1p)
    safe2 = np.where(too_close, 1.0, d2p)
    amp = p.a1 / safe1 + p.a2 / safe2
    w = n1 * n2 * amp * amp
    w = np.where(populated, w, 0.0)
    if w.ndim == 0:
        return float(w)
    return w
