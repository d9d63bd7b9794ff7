"""Velocity selection by two-path interference, against Doppler heating.

With counterpropagating beams the Doppler shift enters the two excitation
paths with opposite signs, so the destructive-interference condition picks
a single velocity

    v0 = (a1*delta2 + a2*delta1) / ((a2 - a1) * k)

(light shifts neglected).  Atoms at v0 never leave the ground state; the
rest are pumped away, which turns the two-photon transition into a velocity
filter.  filter_evolve applies that filter to a weight distribution on a
velocity grid.

competition_mc pits the filter against Doppler-limit laser cooling: an
Ornstein-Uhlenbeck velocity walk (friction plus momentum diffusion, the
small-velocity limit of Doppler cooling) with a quadratic loss rate

    loss(v) = g * friction * ((v - v_selected) / v_D)^2

where v_D = sqrt(diffusion/friction) is the Doppler-equilibrium velocity
scale and g the dimensionless selectiveness.  Survivors thermalize to a
width below v_D; the selective loss buys temperature at the cost of
population.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diamond import DiamondParams, transition_rate
from .errors import AllAtomsLost, NoSelection

__all__ = [
    "VelocityEnsemble",
    "CompetitionParams",
    "CompetitionResult",
    "selected_velocity",
    "filter_evolve",
    "competition_mc",
]


@dataclass
class VelocityEnsemble:
    """Weights |f(v)|^2 on a strictly increasing velocity grid.

    Built normalized (trapezoidal integral 1) at the initial time; pure
    filtering only removes weight, so total_weight() is the surviving
    fraction of the original ensemble.
    """

    velocities: np.ndarray
    weights: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.velocities = np.asarray(self.velocities, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.velocities.ndim != 1 or self.velocities.size < 2:
            raise ValueError("velocity grid must be 1-D with at least two points")
        if self.weights.shape != self.velocities.shape:
            raise ValueError("weights and velocities must have the same shape")
        if np.any(np.diff(self.velocities) <= 0):
            raise ValueError("velocity grid must be strictly increasing")
        if np.any(self.weights < 0):
            raise ValueError("weights must be non-negative")

    def total_weight(self) -> float:
        """Trapezoidal integral of the weights over the grid."""
        return float(np.trapezoid(self.weights, self.velocities))

    @classmethod
    def normalized(cls, velocities, weights, time: float = 0.0) -> "VelocityEnsemble":
        """Build an ensemble rescaled to unit trapezoidal integral."""
        e = cls(velocities=np.asarray(velocities, dtype=float),
                weights=np.asarray(weights, dtype=float), time=time)
        total = e.total_weight()
        if not total > 0.0:
            raise ValueError("cannot normalize an ensemble with zero total weight")
        e.weights = e.weights / total
        return e

    @classmethod
    def gaussian(cls, velocities, sigma: float, center: float = 0.0) -> "VelocityEnsemble":
        """Normalized Gaussian weights of rms width sigma about center."""
        if sigma <= 0.0:
            raise ValueError("sigma must be positive")
        v = np.asarray(velocities, dtype=float)
        w = np.exp(-0.5 * ((v - center) / sigma) ** 2)
        return cls.normalized(v, w, time=0.0)


def selected_velocity(p: DiamondParams) -> float:
    """Velocity singled out by destructive interference (shifts neglected).

    Raises NoSelection when a1 = a2 (the Doppler terms cancel between the
    paths and no velocity is preferred) or k = 0 (no Doppler coupling).
    """
    if p.a1 == p.a2:
        raise NoSelection("a1 = a2: Doppler shifts cancel between the two paths")
    if p.k == 0.0:
        raise NoSelection("k = 0: no Doppler coupling to select on")
    return (p.a1 * p.delta2 + p.a2 * p.delta1) / ((p.a2 - p.a1) * p.k)


def filter_evolve(
    e: VelocityEnsemble, p: DiamondParams, n1: int, n2: int, dt: float
) -> VelocityEnsemble:
    """Deplete each velocity class for a time dt at fixed photon numbers.

    Weights are populations |f|^2, and amplitudes decay as exp(-W t), so
    w(v) -> w(v) * exp(-2 * W(v) * dt).  The selected velocity, where W
    vanishes, keeps its weight.

    Raises ResonantDetuning (propagated) if a grid velocity drives an
    intermediate level inside the detuning guard band.
    """
    if dt < 0:
        raise ValueError("dt must be non-negative")
    w_rate = transition_rate(p, float(n1), float(n2), e.velocities)
    return VelocityEnsemble(
        velocities=e.velocities,
        weights=e.weights * np.exp(-2.0 * np.asarray(w_rate) * dt),
        time=e.time + dt,
    )


@dataclass
class CompetitionParams:
    """Configuration of the selection-versus-heating Monte Carlo.

    g : dimensionless selectiveness of the loss (0 switches selection off).
    v_selected : dark velocity of the filter.
    friction : velocity damping rate of the cooling force.
    diffusion : momentum-diffusion coefficient, expressed as v_D^2 * friction.
    dt, t_total : Euler step and total integration time.
    n_traj : number of independent atoms.
    seed : master seed; trajectory i uses the stream (seed, i), so results
        do not depend on scheduling or chunking.
    v_start : mean of the initial Gaussian ensemble (width is v_D, the
        Doppler-equilibrium width).
    """

    g: float
    friction: float
    diffusion: float
    dt: float
    t_total: float
    n_traj: int
    v_selected: float = 0.0
    seed: int = 0
    v_start: float = 0.0

    def __post_init__(self):
        if self.g < 0:
            raise ValueError("g must be non-negative")
        if self.friction <= 0 or self.diffusion <= 0:
            raise ValueError("friction and diffusion must be positive")
        if self.dt <= 0 or self.t_total <= 0:
            raise ValueError("dt and t_total must be positive")
        if self.n_traj < 1000:
            raise ValueError("n_traj must be at least 1000 (statistical floor)")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.dt * self.friction >= 0.1:
            raise ValueError("dt too coarse: require dt * friction < 0.1")
        # Loss-rate resolution over the range the walk can plausibly reach
        # (6 equilibrium widths beyond the initial offset).
        v_reach = abs(self.v_start - self.v_selected) + 6.0 * self.v_doppler
        if self.dt * self.g * self.friction * (v_reach / self.v_doppler) ** 2 >= 0.5:
            raise ValueError("dt too coarse for this g: loss per step exceeds 0.5")

    @property
    def v_doppler(self) -> float:
        return math.sqrt(self.diffusion / self.friction)

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_total / self.dt)))


@dataclass
class CompetitionResult:
    """Survivor statistics of one competition run."""

    temperature_ratio: float  # survivor velocity variance / v_D^2
    surviving_fraction: float
    n_survivors: int
    histogram: VelocityEnsemble  # normalized survivor velocity distribution


def competition_mc(c: CompetitionParams) -> CompetitionResult:
    """Langevin cooling with selective loss; returns survivor statistics.

    Each atom follows the Euler-Maruyama discretization

        v_{k+1} = v_k - friction * v_k * dt + sqrt(2 * diffusion * dt) * xi_k

    and survives step k with probability exp(-loss(v_k) * dt).  Survival is
    decided by comparing the accumulated hazard with a single unit
    exponential draw, which is distributionally identical to per-step
    Bernoulli trials.  Per-trajectory draw order: initial velocity, death
    exponential, then the step normals.

    Raises AllAtomsLost when no trajectory survives to t_total.
    """
    n_traj, n_steps = c.n_traj, c.n_steps
    v_d = c.v_doppler

    v0 = np.empty(n_traj)
    death = np.empty(n_traj)
    xi = np.empty((n_traj, n_steps))
    for i in range(n_traj):
        rng = np.random.default_rng((c.seed, i))
        v0[i] = rng.normal(loc=c.v_start, scale=v_d)
        death[i] = rng.standard_exponential()
        xi[i] = rng.standard_normal(n_steps)

    v = v0.copy()
    hazard = np.zeros(n_traj)
    loss_k = c.g * c.friction * c.dt / (v_d * v_d)
    kick = math.sqrt(2.0 * c.diffusion * c.dt)
    damp = c.friction * c.dt
    for k in range(n_steps):
        dv = v - c.v_selected
        hazard += loss_k * dv * dv
        v += -damp * v + kick * xi[:, k]

    alive = hazard < death
    n_surv = int(np.count_nonzero(alive))
    if n_surv == 0:
        raise AllAtomsLost(f"no survivors among {n_traj} trajectories (g={c.g:g})")
    v_surv = v[alive]

    if n_surv > 1:
        t_ratio = float(np.var(v_surv, ddof=1)) / (v_d * v_d)
    else:
        t_ratio = 0.0
    n_bins = max(11, min(101, int(round(math.sqrt(n_surv)))))
    counts, edges = np.histogram(v_surv, bins=n_bins)
    centers = 0.5 * (edges[:-1] + edges[1:])
    hist = VelocityEnsemble.normalized(centers, counts.astype(float), time=c.t_total)
    return CompetitionResult(
        temperature_ratio=t_ratio,
        surviving_fraction=n_surv / n_traj,
        n_survivors=n_surv,
        histogram=hist,
    )
