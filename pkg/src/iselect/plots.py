"""Figure rendering for the CLI's --plot flag.

CSV is the data contract; these renderers are a convenience layer that
turns each report into a PNG next to it.  Import stays out of the CLI's
hot path (matplotlib is only loaded when --plot is requested), and the
Agg backend keeps everything headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "coherence_figure",
    "velocity_filter_figure",
    "competition_figure",
    "hydrogen_scan_figure",
    "antiresonance_figure",
    "trajectory_figure",
    "trapped_fraction_figure",
]

_DPI = 150


def _save(fig, path: str):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def coherence_figure(times, r_db, pop, path: str):
    """Coherence gain R(t) in dB plus the surviving ground population."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogx(times, r_db, color="tab:blue", lw=1.5)
    ax.set_xlabel("decay-rate units of time")
    ax.set_ylabel("R (dB)", color="tab:blue")
    ax.tick_params(axis="y", labelcolor="tab:blue")
    ax.grid(True, which="both", alpha=0.3)
    ax2 = ax.twinx()
    ax2.semilogx(times, pop, color="tab:orange", lw=1.2, ls="--")
    ax2.set_ylabel("ground population", color="tab:orange")
    ax2.tick_params(axis="y", labelcolor="tab:orange")
    _save(fig, path)


def velocity_filter_figure(v, w0, wf, v_star, path: str):
    """Velocity distribution before/after filtering; v_star marked if given."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(v, w0, color="0.5", lw=1.2, label="initial")
    ax.plot(v, wf, color="tab:blue", lw=1.5, label="filtered")
    if v_star is not None:
        ax.axvline(v_star, color="tab:red", lw=0.8, ls=":", label="selected v")
    ax.set_xlabel("velocity")
    ax.set_ylabel("weight")
    ax.legend(frameon=False)
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def competition_figure(g, t_ratio, sf, path: str):
    """Temperature vs g, and survivor fraction vs temperature (log-log)."""
    g = np.asarray(g, dtype=float)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    pos = g > 0
    ax1.semilogx(g[pos], np.asarray(t_ratio)[pos], "o-", color="tab:blue")
    ax1.set_xlabel("g")
    ax1.set_ylabel("T / T_D")
    ax1.grid(True, which="both", alpha=0.3)
    ax2.loglog(t_ratio, sf, "x", color="tab:red", ms=8)
    tt = np.linspace(min(t_ratio), max(t_ratio), 50)
    # sqrt guide anchored at the leftmost sweep point
    ax2.loglog(tt, sf[-1] * np.sqrt(tt / t_ratio[-1]), color="0.6", lw=0.8, ls="--",
               label="slope 1/2")
    ax2.set_xlabel("T / T_D")
    ax2.set_ylabel("surviving fraction")
    ax2.legend(frameon=False)
    ax2.grid(True, which="both", alpha=0.3)
    _save(fig, path)


def hydrogen_scan_figure(q, rates, resonant, path: str):
    """Raman rate Q(q) on a log scale with resonant q marked."""
    q = np.asarray(q, dtype=float)
    rates = np.asarray(rates, dtype=float)
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ok = ~np.asarray(resonant, dtype=bool) & (rates > 0)
    ax.semilogy(q[ok], rates[ok], ",", color="tab:blue")
    for n in np.unique(np.rint(q[np.asarray(resonant, dtype=bool)])):
        ax.axvline(n, color="tab:red", lw=0.6, alpha=0.5)
    ax.set_xlabel("q")
    ax.set_ylabel("Q")
    ax.grid(True, which="both", alpha=0.3)
    _save(fig, path)


def antiresonance_figure(q, amplitudes, q_star, path: str):
    """Amplitude S(q) on the bracketing interval with the zero marked."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(q, amplitudes, color="tab:blue", lw=1.2)
    ax.axhline(0.0, color="0.6", lw=0.7)
    ax.axvline(q_star, color="tab:red", lw=0.8, ls=":")
    ax.set_xlabel("q")
    ax.set_ylabel("S")
    ax.set_ylim(-50, 50)
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def trajectory_figure(times, v_over_vr, path: str):
    """Staircase velocity record of a single cooling trajectory."""
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.step(times, v_over_vr, where="post", color="tab:blue", lw=0.9)
    ax.axhspan(-1.0, 1.0, color="tab:green", alpha=0.15, lw=0)
    ax.set_xlabel("time (excitation-rate units)")
    ax.set_ylabel("v / v_r")
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def trapped_fraction_figure(bin_times, fractions, path: str):
    """Coarse-grained trapped fraction against time."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(bin_times, fractions, "o-", color="tab:blue")
    ax.set_xlabel("time (excitation-rate units)")
    ax.set_ylabel("trapped fraction")
    ax.set_ylim(0, 1.05)
    ax.grid(True, alpha=0.3)
    _save(fig, path)
