import math

import numpy as np
import pytest

import curiosity_geom as cg


def test_divergences():
    p = np.array([0.5, 0.5])
    q = np.array([0.25, 0.75])
    assert cg.kl_divergence(p, q) == pytest.approx(0.143841036225890, abs=1e-12)
    assert cg.alpha_divergence(p, q, -1.0) == pytest.approx(cg.kl_divergence(p, q), abs=1e-14)
    assert cg.renyi_divergence(p, q, 2.0) == pytest.approx(math.log(4 / 3), abs=1e-12)
    mid = cg.geodesic(np.array([0.6, 0.4]), np.array([0.2, 0.8]), -1.0, 0.5)
    np.testing.assert_allclose(mid, [0.4, 0.6], atol=1e-15)


def test_information():
    assert cg.alpha_information(0.25, 0.0) == pytest.approx(4.0)
    assert cg.shannon_entropy(np.array([0.5, 0.5])) == pytest.approx(math.log(2))
    with pytest.raises(ValueError):
        cg.alpha_information(0.5, 1.0)


def test_swap_occupancy():
    mdp = cg.FiniteMdp([np.array([[0.0, 1.0], [1.0, 0.0]])], np.array([1.0, 0.0]),
                       np.array([1.0, 0.0]), 1)
    np.testing.assert_allclose(cg.occupancy(mdp), [0.5, 0.5])
    _, marginal, residual = cg.augmented_stationary(mdp)
    np.testing.assert_allclose(marginal, [0.5, 0.5], atol=1e-12)
    assert residual < 1e-12
    mean, se = cg.rollout_return(mdp, 10)
    assert mean == 1.0 and se == 0.0


def test_invalid_mdp_raises_value_error():
    with pytest.raises(ValueError, match=r"transition\[0\]\[0\]"):
        cg.FiniteMdp([np.array([[0.5, 0.6], [1.0, 0.0]])], np.array([1.0, 0.0]),
                     np.array([0.0, 0.0]), 1)


def test_optima():
    r = np.array([1.0, 0.0, 0.0])
    e = math.e
    np.testing.assert_allclose(cg.closed_form_optimum(r, -1.0, 1.0), [e / (e + 2), 1 / (e + 2), 1 / (e + 2)])
    r = np.array([1.0, 0.5, 0.25, 0.0])
    closed = cg.closed_form_optimum(r, 0.0, 1.0)
    assert np.abs(closed - cg.numerical_optimum(r, 0.0, 1.0)).sum() < 1e-6
    assert cg.beta_sweep_residual(r, 0.0, [0.1, 0.3, 1, 3, 10]) < 1e-5
    rows = cg.sweep_table(r, [-1.0, 0.0], [0.1, 1.0, 10.0])
    assert len(rows) == 24


def test_dpi():
    assert cg.dpi_gap(np.array([0.5, 0.375, 0.125]), [0, 1, 1], 0.0) > 0
    assert cg.dpi_gap(np.array([0.5, 0.25, 0.25]), [0, 1, 1], 0.0) == pytest.approx(0, abs=1e-12)
    assert cg.sufficient(np.array([0.5, 0.25, 0.25]), [0, 1, 1])


def test_knn():
    grid = ((np.arange(10_000) + 0.5) / 10_000).reshape(-1, 1)
    assert cg.knn_density(grid, np.array([0.5])) == pytest.approx(1.0, rel=0.25)


def test_teleport_ascent_reaches_oracle():
    r = np.linspace(0.0, 1.0, 6)
    mdp = cg.teleport_mdp(6, 8).with_reward(r)
    _, best = cg.teleport_optimum(r, -1.0, 1.0, 8)
    _, trace = cg.natural_ascent(mdp, -1.0, 1.0, iterations=200)
    assert all(b >= a for a, b in zip(trace, trace[1:]))
    assert trace[-1] >= best - 1e-4


def test_verify_group():
    checks = cg.verify(seed=0, only="dpi")
    assert [c["name"] for c in checks] == ["dpi.convex_witness", "dpi.equality", "dpi.min_gap"]
    assert all(c["pass"] for c in checks)
