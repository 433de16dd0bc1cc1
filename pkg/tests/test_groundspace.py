import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import seeds
from ffspin import generators as gen
from ffspin import linalg as la
from ffspin.errors import DependentSeeds, FrustratedInput, Inconsistent, NotNatural, ObservableTooLarge
from ffspin.groundspace import (DenseBasis, GroundSpace, ProductBasis, default_seeds,
                                expectation_ground_manifold, solve_gauge, symmetric_basis)
from ffspin.hamiltonian import Hamiltonian, LocalObservable
from ffspin.oracle import build_full, ground_expectation, oracle
from ffspin.reduction import reduce_to_complete


def test_symmetric_basis():
    b = symmetric_basis(3)
    np.testing.assert_allclose(b.vectors.conj().T @ b.vectors, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(b.vectors[:, 1] ** 2 * 3, [0, 1, 1, 0, 1, 0, 0, 0])


@given(st.integers(2, 6), seeds)
def test_gauge_reproduces_constraints(n, seed):
    hc = gen.planted_complete(n, seed)
    g = solve_gauge(hc)
    for (u, v), m in hc.edges.items():
        beta = np.conj(g.operators[u].T @ la.EPSILON @ g.operators[v]).reshape(4)
        beta /= np.linalg.norm(beta)
        assert np.real(np.vdot(beta, m @ beta)) == pytest.approx(1.0, abs=1e-8)
    for v in hc.vertices:
        assert np.linalg.det(g.operators[v]) == pytest.approx(1.0, abs=1e-9)


def test_identity_gauge_gives_symmetric_subspace():
    hc = gen.planted_complete(4, 0, identity=True)
    b = ProductBasis(solve_gauge(hc)).orthonormal()
    w = symmetric_basis(4).vectors
    # same span: projectors agree
    np.testing.assert_allclose(b @ b.conj().T, w @ w.conj().T, atol=1e-9)


@given(st.integers(2, 7), seeds)
def test_product_basis_spans_kernel(n, seed):
    hc = gen.planted_complete(n, seed)
    pb = ProductBasis(solve_gauge(hc))
    q = pb.orthonormal()
    assert q.shape[1] == n + 1
    assert np.abs(build_full(hc).matrix @ q).max() < 1e-8
    np.testing.assert_allclose(q.conj().T @ q, np.eye(n + 1), atol=1e-10)


def test_gauge_errors():
    with pytest.raises(NotNatural):
        solve_gauge(Hamiltonian.build([0, 1], [(0, 1, np.diag([1.0, 0, 0, 0]))]))
    h = gen.planted_complete(3, 1)
    missing = Hamiltonian(h.vertices, {e: m for e, m in h.edges.items() if e != (0, 2)}, {})
    with pytest.raises(Inconsistent):
        solve_gauge(missing)


def test_dependent_seeds():
    g = solve_gauge(gen.planted_complete(2, 0))
    s = default_seeds(3)
    with pytest.raises(DependentSeeds):
        ProductBasis(g, [s[0], s[1], 2j * s[0]])


def test_ising_examples():
    for af in (True, False):
        res = reduce_to_complete(gen.ising_pair(af))
        space = GroundSpace.from_result(res)
        assert space.dim == 2
        zz = LocalObservable((0, 1), np.kron(la.PAULI["Z"], la.PAULI["Z"]))
        assert expectation_ground_manifold(res, zz) == pytest.approx(-1.0 if af else 1.0, abs=1e-10)


def test_frustrated_rejected():
    res = reduce_to_complete(gen.double_rank3())
    with pytest.raises(FrustratedInput):
        GroundSpace.from_result(res)
    with pytest.raises(FrustratedInput):
        expectation_ground_manifold(res, LocalObservable((0,), np.eye(2)))


def test_support_limit():
    res = reduce_to_complete(gen.planted_complete(6, 0))
    with pytest.raises(ObservableTooLarge):
        expectation_ground_manifold(res, LocalObservable(tuple(range(5)), np.eye(32)), max_support=4)


@settings(max_examples=25)
@given(seeds)
def test_expectation_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    h = gen.mixed_ensemble(1, seed=seed, n_range=(3, 7))[0]
    res = reduce_to_complete(h)
    if res.frustrated:
        return
    data = oracle(h)
    assert GroundSpace.from_result(res).dim == data.kernel_dim
    sup = tuple(rng.choice(h.vertices, size=2, replace=False).tolist())
    m = la.random_psd(rng, 4, 4)
    got = expectation_ground_manifold(res, LocalObservable(sup, m))
    assert got == pytest.approx(ground_expectation(h, sup, m, data=data), abs=1e-8)


def test_dense_fallback_matches():
    h = gen.planted_complete(4, 3)
    d = DenseBasis(h)
    p = ProductBasis(solve_gauge(h))
    rho_d, rho_p = d.reduced_density([0, 2]), p.reduced_density([0, 2])
    np.testing.assert_allclose(rho_d, rho_p, atol=1e-9)
