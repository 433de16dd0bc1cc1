import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import seeds
from ffspin import generators as gen
from ffspin.entanglement import (LatticeConstants, area_law_bound, bipartition, boundary_count,
                                 default_exponent, entanglement_report, heavy_component_bound,
                                 intervals, lattice_constants, log_law_bound, rank3_cascade_classify,
                                 rectangles, reduce_subsystem, schmidt_measure_bound)
from ffspin.errors import FrustratedSubsystem, InvalidConstants, NotContiguous
from ffspin.oracle import incremental_kernel, schmidt_rank_across


def test_bipartition_chain():
    h = gen.reverse_network_instance(gen.chain_graph(5), seed=0).hamiltonian
    bp = bipartition(h, [1, 2])
    assert bp.boundary_edges == ((0, 1), (2, 3))
    assert bp.boundary_spins == frozenset({1, 2})
    with pytest.raises(ValueError):
        bipartition(h, [9])


def test_regions():
    assert len(list(intervals(4))) == 4 + 3 + 2
    rs = list(rectangles(2, 2))
    assert (0, 1, 2, 3) not in rs and (0, 1) in rs and (0, 2) in rs and len(rs) == 8


def test_lattice_constants_chain():
    k = lattice_constants(gen.chain_graph(8), c=1.0)
    # an interval of 7 spins has one boundary spin
    assert k.k == pytest.approx(1 / 7)
    assert default_exponent(1) == 1.0 and default_exponent(2) == 0.5


def test_boundary_count_grid():
    g = gen.grid_graph(3, 3)
    assert boundary_count(g, [0, 1, 3, 4]) == 3


@settings(max_examples=15)
@given(seeds, st.sampled_from([0.0, 0.2]))
def test_schmidt_bound_holds_on_chains(seed, lock):
    n = 7
    h = gen.reverse_network_instance(gen.chain_graph(n), seed=seed, lock_fraction=lock).hamiltonian
    q = incremental_kernel(h)
    for a in intervals(n):
        red = reduce_subsystem(h, a)
        sb = schmidt_measure_bound(h, a, red)
        assert sb == pytest.approx(log_law_bound(h, a, reduction=red).value)
        assert sb <= heavy_component_bound(h, a).value + 1e-12
        for k in range(q.shape[1]):
            assert np.log2(schmidt_rank_across(q[:, k], list(a), n)) <= sb + 1e-9


def test_log_law_needs_connected_region():
    h = gen.reverse_network_instance(gen.chain_graph(5), seed=1).hamiltonian
    with pytest.raises(NotContiguous):
        log_law_bound(h, [0, 2])


def test_area_law_constants_checked():
    h = gen.reverse_network_instance(gen.chain_graph(6), seed=2, lock_fraction=0.0).hamiltonian
    with pytest.raises(InvalidConstants):
        area_law_bound(h, [0, 1, 2], LatticeConstants(1.0, 5.0, "too large"))
    k = lattice_constants(h.graph(), 1.0)
    b = area_law_bound(h, [0, 1, 2], k)
    assert b.value == min(b.schmidt, b.alpha_over_k)


def test_frustrated_subsystem():
    h = gen.double_rank3()
    with pytest.raises(FrustratedSubsystem):
        reduce_subsystem(h, [0, 1, 2])


def test_cascade_classifier():
    assert rank3_cascade_classify(gen.double_rank3()).kind == "Frustrated"
    assert rank3_cascade_classify(gen.planted_complete(3, 0)).kind == "NoCascade"
    one = gen.cascade_instance(5, 1, seed=3)
    c = rank3_cascade_classify(one)
    assert c.kind == "SingleRank3" and len(c.rank3_edges) == 1


def test_report_json_roundtrip():
    h = gen.reverse_network_instance(gen.grid_graph(3, 3), seed=4, lock_fraction=0.1).hamiltonian
    k = lattice_constants(h.graph(), 0.5)
    rep = entanglement_report(h, [0, 1, 3, 4], k)
    d = json.loads(rep.to_json())
    assert d["schmidt_bound"] == rep.schmidt_bound and d["constants"]["c"] == 0.5
    assert "Schmidt" in rep.table()
