"""Interference-induced state selection in two-photon driven atoms.

Numerical models for a four-level "diamond" scheme driven by two photon
modes: the two excitation paths interfere, and the destructive-interference
condition singles out photon-number pairs, velocity classes, or laser
frequencies.  Subpackages cover the joint two-mode number grid, velocity
selection against Doppler heating, Raman antiresonances in hydrogen, and an
event-driven subrecoil cooling Monte Carlo.
"""

from .errors import (
    AllAtomsLost,
    AtResonance,
    DegenerateSelection,
    InsufficientEpisodes,
    IselectError,
    NoSelection,
    NoSignChange,
    ResonantDetuning,
    TruncationTooTight,
    ZeroVariance,
)
from .diamond import DiamondParams, effective_detuning, interference_residual, transition_rate
from .two_mode import (
    JointModeState,
    SelectionLine,
    coherence_series,
    coherent_joint_state,
    degree_of_coherence,
    evolve,
    ground_population,
    selection_line,
)
from .velocity import (
    CompetitionParams,
    CompetitionResult,
    VelocityEnsemble,
    competition_mc,
    filter_evolve,
    selected_velocity,
)
from .hydrogen import (
    HydrogenRamanParams,
    RamanSpectrum,
    dipole_weight,
    excitation_rate_near_antiresonance,
    find_antiresonance,
    raman_amplitude,
    scan_raman_spectrum,
)
from .subrecoil import (
    FractionGrowth,
    SubrecoilParams,
    Trajectory,
    TrappingStatistics,
    simulate_ensemble,
    simulate_trajectory,
    trapped_fraction_growth,
    trapped_fraction_series,
    trapping_statistics,
)

__version__ = "0.1.0"

__all__ = [
    "AllAtomsLost",
    "AtResonance",
    "CompetitionParams",
    "CompetitionResult",
    "DegenerateSelection",
    "DiamondParams",
    "FractionGrowth",
    "HydrogenRamanParams",
    "InsufficientEpisodes",
    "IselectError",
    "JointModeState",
    "NoSelection",
    "NoSignChange",
    "RamanSpectrum",
    "ResonantDetuning",
    "SelectionLine",
    "SubrecoilParams",
    "Trajectory",
    "TrappingStatistics",
    "TruncationTooTight",
    "VelocityEnsemble",
    "ZeroVariance",
    "coherence_series",
    "coherent_joint_state",
    "competition_mc",
    "degree_of_coherence",
    "dipole_weight",
    "effective_detuning",
    "evolve",
    "excitation_rate_near_antiresonance",
    "filter_evolve",
    "find_antiresonance",
    "ground_population",
    "interference_residual",
    "raman_amplitude",
    "scan_raman_spectrum",
    "selected_velocity",
    "selection_line",
    "simulate_ensemble",
    "simulate_trajectory",
    "transition_rate",
    "trapped_fraction_growth",
    "trapped_fraction_series",
    "trapping_statistics",
]
