import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import seeds
from ffspin.errors import InsufficientTrials
from ffspin.percolation import (RandomLatticeConfig, clusters, degeneracy_bound, lattice_edges,
                                monte_carlo_scaling, sample_lattice, theta_curve)


def test_edge_counts():
    assert len(lattice_edges(2, 4)) == 2 * 4 * 3
    assert len(lattice_edges(2, 4, periodic=True)) == 2 * 16
    assert len(lattice_edges(3, 3)) == 3 * 9 * 2


def test_config_validation():
    with pytest.raises(ValueError):
        RandomLatticeConfig(2, 8, 1.5)


def test_endpoints():
    for p, want in ((0.0, 64.0), (1.0, np.log2(65))):
        cfg = RandomLatticeConfig(2, 8, p, seed=1)
        dec = clusters(cfg.n, lattice_edges(2, 8), sample_lattice(cfg))
        assert degeneracy_bound(dec).log2_bound == want


@given(seeds, st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_coupled_monotone(seed, p, q):
    lo, hi = sorted((p, q))
    edges = lattice_edges(2, 10)
    a = sample_lattice(RandomLatticeConfig(2, 10, lo, seed))
    b = sample_lattice(RandomLatticeConfig(2, 10, hi, seed))
    assert np.all(b[a])
    blo = degeneracy_bound(clusters(100, edges, a)).log2_bound
    bhi = degeneracy_bound(clusters(100, edges, b)).log2_bound
    assert bhi <= blo


def test_reproducible():
    cfg = RandomLatticeConfig(2, 16, 0.5, seed=7)
    np.testing.assert_array_equal(sample_lattice(cfg, 3), sample_lattice(cfg, 3))
    assert not np.array_equal(sample_lattice(cfg, 3), sample_lattice(cfg, 4))


def test_scaling_report():
    with pytest.raises(InsufficientTrials):
        monte_carlo_scaling(2, 0.5, [8], trials=5)
    rep = monte_carlo_scaling(2, 0.7, [8, 16], trials=30, seed=2)
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0] == ["L", "trial", "k", "A0", "bound"] and len(rows) == 61
    d = json.loads(rep.to_json())
    assert set(d["fit"]) == {"a_log2n", "b_n"}
    assert d["sizes"][1]["theta"] > 0.5


def test_theta_onset_small():
    c = theta_curve(2, 24, np.arange(0.3, 0.71, 0.05), trials=40, seed=1)
    assert np.all(np.diff(c.theta) >= 0)
    assert 0.35 <= c.onset <= 0.65
