"""Two-photon rate: detunings, interference residual, factorized form."""

import numpy as np
import pytest

from iselect import (
    DiamondParams,
    effective_detuning,
    interference_residual,
    transition_rate,
)
from iselect.errors import ResonantDetuning

CANONICAL = dict(
    a1=14.0,
    a2=-14.0,
    delta1=-1.0,
    delta2=-1.0,
    beta=np.array([[1e-4, 2e-5], [2e-5, 1e-4]]),
)


def random_params(rng, k_range=(0.1, 2.0)):
    return DiamondParams(
        a1=rng.uniform(-20, 20),
        a2=rng.uniform(-20, 20),
        delta1=rng.uniform(-5, -0.5),
        delta2=rng.uniform(-5, -0.5),
        beta=rng.uniform(-1e-4, 1e-4, (2, 2)),
        k=rng.uniform(*k_range),
    )


def brute_detuning(p, path, n1, n2, v):
    # same grouping as the implementation: light shifts summed first
    b = p.beta
    i = path - 1
    shift = b[i, 0] * n1 + b[i, 1] * n2
    sign = -1.0 if path == 1 else 1.0
    delta = p.delta1 if path == 1 else p.delta2
    return delta + shift + sign * p.k * v


def test_effective_detuning_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(300):
        p = random_params(rng)
        n1, n2 = rng.integers(0, 500, 2)
        v = rng.uniform(-3, 3)
        for path in (1, 2):
            got = effective_detuning(p, path, int(n1), int(n2), v)
            assert got == brute_detuning(p, path, int(n1), int(n2), v)


def test_effective_detuning_rejects_bad_path():
    p = DiamondParams(**CANONICAL)
    with pytest.raises(ValueError):
        effective_detuning(p, 3, 1, 1, 0.0)


def test_doppler_signs_oppose():
    # path 1 sees -kv, path 2 sees +kv
    p = DiamondParams(a1=1.0, a2=1.0, delta1=-2.0, delta2=-2.0, k=1.0)
    d1 = effective_detuning(p, 1, 0, 0, 0.7)
    d2 = effective_detuning(p, 2, 0, 0, 0.7)
    assert d1 == -2.0 - 0.7
    assert d2 == -2.0 + 0.7


def test_rate_matches_per_cell_oracle():
    # W = n1*n2*(a1*d2' + a2*d1')^2 / (d1'*d2')^2, cell by cell in plain floats
    rng = np.random.default_rng(1)
    for _ in range(200):
        p = random_params(rng)
        n1 = int(rng.integers(1, 400))
        n2 = int(rng.integers(1, 400))
        v = rng.uniform(-3, 3)
        d1 = brute_detuning(p, 1, n1, n2, v)
        d2 = brute_detuning(p, 2, n1, n2, v)
        if min(abs(d1), abs(d2)) < p.detuning_floor:
            continue
        expect = n1 * n2 * (p.a1 * d2 + p.a2 * d1) ** 2 / (d1 * d1 * d2 * d2)
        got = transition_rate(p, n1, n2, v)
        assert got == pytest.approx(expect, rel=1e-12)


def test_rate_zero_iff_residual_zero_or_empty_mode():
    rng = np.random.default_rng(2)
    for _ in range(2000):
        p = random_params(rng)
        n1 = int(rng.integers(0, 300))
        n2 = int(rng.integers(0, 300))
        v = rng.uniform(-3, 3)
        try:
            w = transition_rate(p, n1, n2, v)
        except ResonantDetuning:
            continue
        r = interference_residual(p, n1, n2, v)
        assert (w == 0.0) == (r == 0.0 or n1 * n2 == 0)


def test_rate_broadcasts_like_scalar_loop():
    rng = np.random.default_rng(3)
    p = random_params(rng)
    n1 = np.arange(0, 40)[:, None]
    n2 = np.arange(0, 30)[None, :]
    grid = transition_rate(p, n1, n2, 0.4)
    assert grid.shape == (40, 30)
    for i in (0, 7, 39):
        for j in (0, 11, 29):
            assert grid[i, j] == transition_rate(p, i, j, 0.4)


def test_rate_rejects_negative_photon_numbers():
    p = DiamondParams(**CANONICAL)
    with pytest.raises(ValueError):
        transition_rate(p, -1, 5, 0.0)


def test_empty_mode_is_dark_even_at_resonance():
    # n1*n2 = 0 cells never divide by the detunings, so a resonant v there
    # must not raise
    p = DiamondParams(a1=3.0, a2=5.0, delta1=-1.0, delta2=-1.0, k=1.0)
    assert transition_rate(p, 0, 10, 1.0) == 0.0  # d2' = 0 at v = 1
    with pytest.raises(ResonantDetuning):
        transition_rate(p, 1, 10, 1.0)


def test_resonance_guard_uses_relative_floor():
    p = DiamondParams(a1=1.0, a2=1.0, delta1=-1.0, delta2=-2.0)
    assert p.detuning_floor == 2e-9  # 1e-9 of the largest bare detuning
    p_wide = DiamondParams(a1=1.0, a2=1.0, delta1=-1.0, delta2=-2.0, detuning_floor=0.5)
    assert p_wide.detuning_floor == 0.5


def test_dark_diagonal_is_exact_for_symmetric_shifts():
    # beta11 = beta22, beta12 = beta21, delta1 = delta2, a1 = -a2: both paths
    # see bitwise-identical effective detunings on n2 = n1, so the residual
    # cancels exactly in floating point, not just approximately.
    p = DiamondParams(**CANONICAL)
    n = np.arange(0, 1200)
    w = transition_rate(p, n, n, 0.0)
    assert np.all(w == 0.0)


def test_off_diagonal_is_bright():
    p = DiamondParams(**CANONICAL)
    n = np.arange(1, 500)
    assert np.all(transition_rate(p, n, n + 1, 0.0) > 0.0)
    assert np.all(transition_rate(p, n + 1, n, 0.0) > 0.0)


def test_residual_sign_flip_locates_zero_crossing():
    # the residual is linear in v, so it changes sign across the selected
    # velocity; the rate is a square and dips to zero there
    p = DiamondParams(a1=10.0, a2=-14.0, delta1=-9.0, delta2=-8.0, k=1.2)
    v_star = (p.a1 * p.delta2 + p.a2 * p.delta1) / ((p.a2 - p.a1) * p.k)
    r_lo = interference_residual(p, 1, 1, v_star - 0.5)
    r_hi = interference_residual(p, 1, 1, v_star + 0.5)
    assert r_lo * r_hi < 0.0


def test_from_dict_round_trips_through_to_dict():
    p = DiamondParams(**CANONICAL, k=0.3)
    q = DiamondParams.from_dict(p.to_dict())
    assert q.a1 == p.a1 and q.a2 == p.a2
    assert q.delta1 == p.delta1 and q.delta2 == p.delta2
    assert q.k == p.k
    assert q.detuning_floor == p.detuning_floor
    assert np.array_equal(q.beta, p.beta)


def test_from_dict_requires_core_keys():
    with pytest.raises(KeyError):
        DiamondParams.from_dict({"a1": 1.0, "a2": 2.0, "delta1": -1.0})


def test_beta_shape_is_validated():
    with pytest.raises(ValueError):
        DiamondParams(a1=1.0, a2=1.0, delta1=-1.0, delta2=-1.0, beta=np.ones(3))
