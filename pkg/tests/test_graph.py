"""Topology construction and mixing-matrix spectral checks."""

import numpy as np
import pytest

from cmzo import (
    ConnectivityFailure,
    SpectrumViolation,
    build_topology,
    metropolis_weights,
    spectral_quantities,
    validate_mixing_matrix,
)

STOCH_TOL = 1e-12


def test_complete_n2_single_edge():
    topo = build_topology("complete", 2)
    assert topo.edges == frozenset({(0, 1)})


def test_ring_n4_edges():
    topo = build_topology("ring", 4)
    assert topo.edges == frozenset({(0, 1), (1, 2), (2, 3), (0, 3)})


def test_explicit_disconnected_rejected():
    with pytest.raises(ConnectivityFailure):
        build_topology("explicit", 3, edges=[(0, 1)])


def test_explicit_self_loop_rejected():
    with pytest.raises(ValueError):
        build_topology("explicit", 2, edges=[(0, 0), (0, 1)])


def test_erdos_renyi_connected_and_deterministic():
    t1 = build_topology("erdos_renyi", 12, seed=5, er_p=0.3)
    t2 = build_topology("erdos_renyi", 12, seed=5, er_p=0.3)
    assert t1.edges == t2.edges
    assert t1.n == 12


def test_erdos_renyi_bad_p():
    with pytest.raises(ValueError):
        build_topology("erdos_renyi", 4, er_p=0.0)


def test_metropolis_ring4_uniform_third():
    m = metropolis_weights(build_topology("ring", 4))
    # degree 2 everywhere: every edge weight and diagonal is exactly 1/3
    expected = np.array(
        [
            [1 / 3, 1 / 3, 0, 1 / 3],
            [1 / 3, 1 / 3, 1 / 3, 0],
            [0, 1 / 3, 1 / 3, 1 / 3],
            [1 / 3, 0, 1 / 3, 1 / 3],
        ]
    )
    np.testing.assert_allclose(m.weights, expected, atol=1e-15)


def test_metropolis_complete2():
    m = metropolis_weights(build_topology("complete", 2))
    np.testing.assert_allclose(m.weights, [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)
    assert m.spectral_gap == pytest.approx(1.0, abs=1e-12)
    assert m.lambda_dev == pytest.approx(1.0, abs=1e-12)


def test_metropolis_star3():
    m = metropolis_weights(build_topology("explicit", 3, edges=[(0, 1), (0, 2)]))
    expected = np.array(
        [
            [1 / 3, 1 / 3, 1 / 3],
            [1 / 3, 2 / 3, 0],
            [1 / 3, 0, 2 / 3],
        ]
    )
    np.testing.assert_allclose(m.weights, expected, atol=1e-15)


def test_spectral_ring4():
    # circulant eigenvalues 1/3 + (2/3) cos(2 pi k / 4) = {1, 1/3, -1/3, 1/3}
    m = metropolis_weights(build_topology("ring", 4))
    assert m.spectral_gap == pytest.approx(2 / 3, abs=1e-12)
    assert m.lambda_dev == pytest.approx(4 / 3, abs=1e-12)


def test_spectral_identity_rejected():
    with pytest.raises(SpectrumViolation):
        spectral_quantities(np.eye(3))


def test_spectral_requires_symmetry():
    w = np.array([[0.5, 0.5], [0.4, 0.6]])
    with pytest.raises(ValueError):
        spectral_quantities(w)


@pytest.mark.parametrize("kind,n", [("ring", 5), ("complete", 6), ("erdos_renyi", 9)])
def test_mixing_invariants(kind, n):
    topo = build_topology(kind, n, seed=2, er_p=0.4)
    m = metropolis_weights(topo)
    ones = np.ones(n)
    assert np.max(np.abs(m.weights @ ones - ones)) <= STOCH_TOL
    assert np.max(np.abs(ones @ m.weights - ones)) <= STOCH_TOL
    assert 0.0 < m.spectral_gap <= 1.0
    assert m.lambda_dev >= m.spectral_gap
    validate_mixing_matrix(m, topo)


@pytest.mark.parametrize("kind,n", [("ring", 4), ("complete", 6), ("erdos_renyi", 20)])
def test_gossip_norm_identity(kind, n):
    # ||W - (1/n) 1 1^T||_2 equals 1 - delta for the dense spectral norm
    topo = build_topology(kind, n, seed=7, er_p=0.35)
    m = metropolis_weights(topo)
    gap_norm = np.linalg.norm(m.weights - np.ones((n, n)) / n, ord=2)
    assert abs(gap_norm - (1.0 - m.spectral_gap)) <= 1e-10


@pytest.mark.parametrize("kind,n", [("ring", 6), ("complete", 4), ("erdos_renyi", 11)])
def test_constant_vectors_are_fixed_points(kind, n):
    topo = build_topology(kind, n, seed=3, er_p=0.5)
    m = metropolis_weights(topo)
    for c in (1.0, -2.5, 1e6):
        v = np.full(n, c)
        assert np.max(np.abs(m.weights @ v - v)) <= STOCH_TOL * max(1.0, abs(c))


def test_single_agent_degenerates():
    m = metropolis_weights(build_topology("ring", 1))
    np.testing.assert_allclose(m.weights, [[1.0]])
    assert m.spectral_gap == 1.0
    assert m.lambda_dev == 0.0
