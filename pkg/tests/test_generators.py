import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import seeds
from ffspin import generators as gen
from ffspin import linalg as la
from ffspin.oracle import build_full, spectrum_verdict


@given(seeds)
def test_random_gauge(seed):
    m = gen.random_gauge(np.random.default_rng(seed))
    assert np.linalg.det(m) == pytest.approx(1.0)
    assert np.linalg.cond(m) <= 10 + 1e-9


@given(st.integers(2, 6), seeds)
def test_planted_dimension(n, seed):
    h = gen.planted_complete(n, seed)
    assert len(h.edges) == n * (n - 1) // 2
    assert spectrum_verdict(h).kernel_dim == n + 1


@given(seeds, st.floats(0, 1), st.integers(0, 2))
def test_reverse_network_is_frustration_free(seed, lock, n_seed):
    inst = gen.reverse_network_instance(gen.grid_graph(2, 3), seed, lock, seed_edges=n_seed)
    h = inst.hamiltonian
    zero = np.ones(1, dtype=complex)
    for v in h.vertices:
        zero = np.kron(zero, np.linalg.inv(inst.gauge[v])[:, 0])
    assert np.abs(build_full(h).matrix @ zero).max() < 1e-9 * np.linalg.norm(zero)
    assert sum(k == "seed" for k in inst.kinds.values()) == n_seed
    ranks = h.ranks()
    for e, k in inst.kinds.items():
        assert ranks[e] == {"light": 1, "lock": 2, "seed": 3}[k]


def test_grid_labels():
    g = gen.grid_graph(3, 4)
    assert g.has_edge(0, 1) and g.has_edge(0, 4) and not g.has_edge(3, 4)


@given(seeds, st.integers(3, 9))
def test_random_graph_connected(seed, n):
    assert nx.is_connected(gen.random_connected_graph(n, np.random.default_rng(seed)))


def test_cascade_instance_rank3_count():
    for k in (1, 2):
        h = gen.cascade_instance(6, k, seed=5)
        assert sum(r == 3 for r in h.ranks().values()) == k


def test_xx_raw_kernel_is_singlet():
    m = gen.xx4cycle_raw().term(1, 2)
    ker = la.kernel_basis(m)
    assert len(ker) == 1 and abs(abs(np.vdot(ker[0], la.SINGLET)) - 1) < 1e-12


def test_mixed_ensemble_reproducible():
    a = gen.mixed_ensemble(5, seed=3)
    b = gen.mixed_ensemble(5, seed=3)
    for x, y in zip(a, b):
        assert x.vertices == y.vertices
        for e in x.edges:
            np.testing.assert_array_equal(x.edges[e], y.edges[e])
