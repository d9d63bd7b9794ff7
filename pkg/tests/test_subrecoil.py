"""Event-driven subrecoil cooling: waiting times, episodes, tail statistics."""

import numpy as np
import pytest

from iselect import (
    SubrecoilParams,
    Trajectory,
    simulate_ensemble,
    simulate_trajectory,
    trapped_fraction_growth,
    trapped_fraction_series,
    trapping_statistics,
)
from iselect.errors import InsufficientEpisodes
from iselect.subrecoil import worker_count


def test_rate_is_quadratic_then_capped():
    p = SubrecoilParams(v_r=2.0, t_total=10.0, rate_at_recoil=3.0, rate_exponent_cap=50.0)
    assert p.rate(2.0) == 3.0
    assert p.rate(4.0) == 12.0
    assert p.rate(-4.0) == 12.0  # even in v
    assert p.rate(1e9) == 150.0  # cap * rate_at_recoil
    assert p.rate(0.0) == 0.0


def test_rate_table_is_anchored_at_the_recoil_velocity():
    p = SubrecoilParams(
        v_r=1.0,
        t_total=10.0,
        rate_at_recoil=2.0,
        rate_table=(np.array([0.0, 2.0]), np.array([0.0, 8.0])),
    )
    assert p.rate(1.0) == 2.0  # rescaled so the anchor holds exactly
    assert p.rate(0.5) == 1.0  # linear interpolation of the table
    assert p.rate(5.0) == 4.0  # clamped beyond the last sample
    assert p.rate(-0.5) == p.rate(0.5)


def test_rate_table_validation():
    with pytest.raises(ValueError):
        SubrecoilParams(v_r=1.0, t_total=1.0,
                        rate_table=(np.array([2.0, 0.0]), np.array([1.0, 2.0])))
    with pytest.raises(ValueError):
        SubrecoilParams(v_r=1.0, t_total=1.0,
                        rate_table=(np.array([0.0, 2.0]), np.array([-1.0, 2.0])))
    with pytest.raises(ValueError):
        # table identically zero around v_r: no anchor possible
        SubrecoilParams(v_r=1.0, t_total=1.0,
                        rate_table=(np.array([0.0, 2.0]), np.array([0.0, 0.0])))


def test_params_validation():
    with pytest.raises(ValueError):
        SubrecoilParams(v_r=0.0, t_total=1.0)
    with pytest.raises(ValueError):
        SubrecoilParams(v_r=1.0, t_total=-1.0)
    with pytest.raises(ValueError):
        SubrecoilParams(v_r=1.0, t_total=1.0, n_traj=0)
    with pytest.raises(ValueError):
        SubrecoilParams(v_r=1.0, t_total=1.0, repump_recoils=-1)


def test_zero_velocity_is_dark():
    p = SubrecoilParams(v_r=1.0, t_total=1e6)
    tr = simulate_trajectory(p, 0.0, np.random.default_rng(0))
    assert tr.n_events == 0
    assert len(tr.episodes) == 1
    assert tr.velocity_at(1e5) == 0.0


def test_deterministic_kick_without_repump():
    # repump_recoils = 0 strips the randomness: each event moves v toward 0
    # by exactly one Raman kick
    p = SubrecoilParams(v_r=1.0, t_total=50.0, repump_recoils=0)
    tr = simulate_trajectory(p, 5.0, np.random.default_rng((0, 0)))
    np.testing.assert_allclose(tr.velocities[:4], [3.0, 1.0, -1.0, 1.0])


def test_first_waiting_time_has_the_right_mean():
    # at fixed v the waiting time is exponential with rate(v); check the mean
    p = SubrecoilParams(v_r=1.0, t_total=1e9, repump_recoils=0)
    v0 = 2.0  # rate = 4
    waits = []
    for i in range(2000):
        tr = simulate_trajectory(p, v0, np.random.default_rng((99, i)))
        waits.append(tr.times[0])
    mean = float(np.mean(waits))
    assert mean == pytest.approx(0.25, abs=4 * 0.25 / np.sqrt(2000))


def test_episode_bounds_tile_the_horizon():
    p = SubrecoilParams(v_r=1.0, t_total=200.0)
    tr = simulate_trajectory(p, 4.0, np.random.default_rng((3, 5)))
    starts, ends, vels = tr.episode_bounds()
    assert starts[0] == 0.0
    assert ends[-1] == p.t_total
    np.testing.assert_array_equal(starts[1:], ends[:-1])
    assert vels[0] == tr.v_init
    assert len(vels) == tr.n_events + 1


def test_velocity_at_is_piecewise_constant():
    tr = Trajectory(v_init=3.0, times=np.array([1.0, 4.0]),
                    velocities=np.array([2.0, -1.0]), t_total=10.0)
    assert tr.velocity_at(0.0) == 3.0
    assert tr.velocity_at(0.999) == 3.0
    assert tr.velocity_at(1.0) == 2.0  # right-continuous at events
    assert tr.velocity_at(4.0) == -1.0
    assert tr.velocity_at(10.0) == -1.0
    np.testing.assert_array_equal(tr.velocity_at(np.array([0.5, 2.0, 9.0])),
                                  [3.0, 2.0, -1.0])


def test_far_initial_velocity_is_rejected():
    p = SubrecoilParams(v_r=1.0, t_total=10.0)
    with pytest.raises(ValueError):
        simulate_trajectory(p, 150.0, np.random.default_rng(0))


def test_ensemble_is_deterministic_and_scheduling_independent():
    p = SubrecoilParams(v_r=1.0, t_total=500.0, n_traj=40, seed=7)
    serial = simulate_ensemble(p, workers=1)
    again = simulate_ensemble(p, workers=1)
    forked = simulate_ensemble(p, workers=3)
    assert len(serial) == 40
    for a, b in zip(serial, again):
        np.testing.assert_array_equal(a.times, b.times)
    for a, b in zip(serial, forked):
        np.testing.assert_array_equal(a.times, b.times)
        np.testing.assert_array_equal(a.velocities, b.velocities)
        assert a.v_init == b.v_init


def test_worker_count_env_parsing(monkeypatch):
    monkeypatch.delenv("ISELECT_THREADS", raising=False)
    assert worker_count() == 1
    monkeypatch.setenv("ISELECT_THREADS", "0")
    assert worker_count() == 1
    monkeypatch.setenv("ISELECT_THREADS", "6")
    assert worker_count() == 6
    monkeypatch.setenv("ISELECT_THREADS", "banana")
    with pytest.raises(ValueError):
        worker_count()


def test_most_atoms_cool_from_four_recoils():
    # ensemble oracle: starting at 4 v_r, over half the atoms end trapped
    p = SubrecoilParams(v_r=1.0, t_total=5.0e4)
    n_cold = 0
    for i in range(1000):
        tr = simulate_trajectory(p, 4.0, np.random.default_rng((0, i)))
        v_end = tr.velocities[-1] if tr.velocities.size else tr.v_init
        if abs(v_end) < 1.0:
            n_cold += 1
    assert n_cold / 1000 > 0.5


def test_tail_exponent_recovers_synthetic_pareto():
    # independent oracle: renewal process with exact Pareto(1/2) waiting
    # times; the estimator must read the exponent back
    rng = np.random.default_rng(0)
    trajs = []
    for _ in range(1000):
        times = []
        t = 0.0
        while True:
            t += rng.uniform() ** -2.0  # P(tau > t) = t^(-1/2), t >= 1
            if t >= 1.0e4:
                break
            times.append(t)
        arr = np.asarray(times)
        trajs.append(Trajectory(v_init=0.0, times=arr,
                                velocities=np.zeros(arr.size), t_total=1.0e4))
    stats = trapping_statistics(trajs, v_trap=1.0)
    assert stats.tail_exponent == pytest.approx(0.5, abs=0.1)


def test_quadratic_rate_has_levy_tail_at_test_scale():
    p = SubrecoilParams(v_r=1.0, t_total=2.0e4, n_traj=2000, seed=5)
    stats = trapping_statistics(simulate_ensemble(p), v_trap=1.0)
    assert 0.4 < stats.tail_exponent < 0.6
    assert stats.n_episodes >= 100


def test_constant_rate_rejects_the_power_law():
    # flat table: exponential waiting everywhere, no heavy tail
    p = SubrecoilParams(v_r=1.0, t_total=2000.0, n_traj=2000, seed=3,
                        rate_table=(np.array([0.0, 50.0]), np.array([1.0, 1.0])))
    stats = trapping_statistics(simulate_ensemble(p), v_trap=1.0)
    assert stats.tail_exponent > 2.0


def test_insufficient_episodes():
    p = SubrecoilParams(v_r=1.0, t_total=5.0, n_traj=3, seed=0)
    trajs = simulate_ensemble(p)
    with pytest.raises(InsufficientEpisodes):
        trapping_statistics(trajs, v_trap=1e-9)


def test_trapped_fraction_series_brackets():
    p = SubrecoilParams(v_r=1.0, t_total=2000.0, n_traj=200, seed=1)
    trajs = simulate_ensemble(p)
    times, frac = trapped_fraction_series(trajs, v_trap=1.0)
    assert times[0] == 0.0 and times[-1] == p.t_total
    assert np.all((0.0 <= frac) & (frac <= 1.0))
    # cooling accumulates: end more trapped than start
    assert frac[-1] > frac[0]


def test_growth_report_is_monotone_for_cooling():
    p = SubrecoilParams(v_r=1.0, t_total=1.0e4, n_traj=1500, seed=2)
    trajs = simulate_ensemble(p)
    g = trapped_fraction_growth(trajs, v_trap=1.0)
    assert g.non_decreasing
    assert len(g.fractions) >= 10
    with pytest.raises(ValueError):
        trapped_fraction_growth(trajs, v_trap=1.0, n_bins=5)


def test_trapping_statistics_validates_v_trap():
    with pytest.raises(ValueError):
        trapping_statistics([], v_trap=0.0)
