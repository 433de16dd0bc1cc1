import numpy as np
import pytest
from hypothesis import given, settings

from conftest import seeds
from ffspin import generators as gen
from ffspin import linalg as la
from ffspin.errors import NoEntangledBasisVector, NoSuchTerm, RankMismatch
from ffspin.hamiltonian import Hamiltonian
from ffspin.oracle import build_full, spectrum_verdict
from ffspin.reduction import (TwoSpinContraction, accumulate_term, contract_two_spin,
                              contraction_isometry, delete_spin, induce_constraint,
                              reduce_to_complete, replay_trace, trace_from_json, trace_to_json)

K0, K1 = np.eye(2, dtype=complex)


def _colinear(u, v):
    return abs(abs(np.vdot(u, v)) - np.linalg.norm(u) * np.linalg.norm(v)) < 1e-10


def test_induce_product_examples():
    out = induce_constraint(np.kron(K0, K1), np.kron(K0, K0))
    assert _colinear(out, np.kron(K0, K0))
    assert induce_constraint(np.kron(K0, K1), np.kron(K1, K0)) is None


def test_induce_singlets_give_singlet():
    assert _colinear(induce_constraint(la.SINGLET, la.SINGLET), la.SINGLET)


def test_accumulate():
    p = np.outer(la.SINGLET, la.SINGLET.conj())
    np.testing.assert_allclose(accumulate_term(p, -2 * la.SINGLET), p)
    v = np.kron(K0, K0)
    assert la.operator_rank(accumulate_term(p, v)) == 2
    np.testing.assert_allclose(accumulate_term(None, v), np.outer(v, v))


def test_golden_xx_contraction():
    h = gen.xx4cycle()
    h2, rec = contract_two_spin(h, (3, 4), isometry=gen.xx4cycle_isometry())
    assert isinstance(rec, TwoSpinContraction) and rec.removed == 4
    np.testing.assert_allclose(h2.term(2, 3), np.diag([1, 0, 0, 1]), atol=1e-10)
    np.testing.assert_allclose(h2.term(1, 3), np.diag([0, 1, 1, 0]), atol=1e-10)


def test_contract_errors():
    h = gen.xx4cycle()
    with pytest.raises(NoSuchTerm):
        contract_two_spin(h, (1, 3))
    singlet = np.outer(la.SINGLET, la.SINGLET.conj())
    with pytest.raises(RankMismatch):
        contraction_isometry(singlet)
    prod = np.diag([0, 0, 1, 1]).astype(complex)  # kernel |0> (x) C^2
    with pytest.raises(NoEntangledBasisVector):
        contraction_isometry(prod, require_entangled=True)


@given(seeds)
def test_isometry_contains_kernel(seed):
    rng = np.random.default_rng(seed)
    for rank in (2, 3):
        t = gen.random_term(rng, rank)
        u = contraction_isometry(t)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-9)
        proj = u @ u.conj().T
        for k in la.kernel_basis(t):
            np.testing.assert_allclose(proj @ k, k, atol=1e-9)
        assert not la.is_product_state(u[:, 1])


def test_delete_spin():
    h = Hamiltonian.build([0, 1], [(0, 1, np.outer(la.SINGLET, la.SINGLET))], [(0, np.diag([1, 0]))])
    h2, rec = delete_spin(h, 0)
    assert h2.vertices == (1,)
    np.testing.assert_allclose(np.abs(rec.state), [0, 1])
    # singlet restricted to spin 0 in |1> pins spin 1 to |1>
    np.testing.assert_allclose(np.abs(la.kernel_basis(h2.singles[1])[0]), [0, 1], atol=1e-12)
    full = Hamiltonian.build([0], [], [(0, np.diag([1.0, 2.0]))], normalize=False)
    assert delete_spin(full, 0).frustrated


def test_golden_verdicts():
    ex = gen.golden_examples()
    assert reduce_to_complete(ex["xx4cycle"]).n_c == 1
    assert reduce_to_complete(ex["ising-af-pair"]).n_c == 1
    assert reduce_to_complete(ex["double-rank3"]).frustrated


def _check_network(h, res):
    from ffspin.groundspace import GroundSpace
    q = GroundSpace.from_result(res).ground_basis()
    d = build_full(h).matrix
    assert np.abs(d @ q).max() < 1e-8
    np.testing.assert_allclose(q.conj().T @ q, np.eye(q.shape[1]), atol=1e-8)


@settings(max_examples=25)
@given(seeds)
def test_reduction_matches_oracle(seed):
    h = gen.mixed_ensemble(1, seed=seed, n_range=(3, 7))[0]
    res = reduce_to_complete(h)
    v = spectrum_verdict(h)
    assert res.frustrated == (not v.frustration_free)
    if not res.frustrated:
        _check_network(h, res)
        assert res.network.is_forest()


@settings(max_examples=20)
@given(seeds)
def test_order_independent_verdict(seed):
    h = gen.mixed_ensemble(1, seed=seed, n_range=(3, 7))[0]
    base = reduce_to_complete(h).frustrated
    for k in range(3):
        assert reduce_to_complete(h, rng=np.random.default_rng([seed, k])).frustrated == base


def test_replay_and_json_roundtrip():
    inst = gen.reverse_network_instance(gen.grid_graph(2, 3), seed=3, lock_fraction=0.5)
    res = reduce_to_complete(inst.hamiltonian)
    assert not res.frustrated
    again = replay_trace(inst.hamiltonian, trace_from_json(trace_to_json(res.trace)))
    assert again.vertices == res.hamiltonian.vertices
    for e, m in res.hamiltonian.edges.items():
        np.testing.assert_array_equal(again.edges[e], m)


def test_region_leaves_outside_untouched():
    h = gen.reverse_network_instance(gen.chain_graph(6), seed=1, lock_fraction=0.3).hamiltonian
    res = reduce_to_complete(h, region=[0, 1, 2])
    for e in ((3, 4), (4, 5)):
        np.testing.assert_array_equal(res.hamiltonian.edges[e], h.edges[e])
