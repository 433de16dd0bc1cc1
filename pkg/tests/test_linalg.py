import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import seeds
from ffspin import linalg as la
from ffspin.errors import DimensionMismatch, NotHermitian

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)


def test_schmidt_examples():
    np.testing.assert_allclose(la.schmidt_coefficients(np.kron(KET0, KET1)), [1, 0], atol=1e-12)
    np.testing.assert_allclose(la.schmidt_coefficients(la.SINGLET), [2 ** -0.5] * 2, atol=1e-12)


def test_product_state_examples():
    assert la.is_product_state(np.kron(KET0, KET0))
    assert not la.is_product_state(la.SINGLET)
    t = 0.3
    assert not la.is_product_state(np.cos(t) * np.kron(KET0, KET0) + np.sin(t) * np.kron(KET1, KET1))


def test_dimension_errors():
    with pytest.raises(DimensionMismatch):
        la.schmidt_decompose(np.ones(3))
    with pytest.raises(DimensionMismatch):
        la.partial_contraction(np.ones(4), np.ones(8))


def test_not_hermitian():
    with pytest.raises(NotHermitian):
        la.is_product_operator(np.array([[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]))


@given(seeds)
def test_schmidt_reconstructs(seed):
    psi = la.random_state(np.random.default_rng(seed))
    d = la.schmidt_decompose(psi)
    np.testing.assert_allclose(d.reconstruct(), psi, atol=1e-9)
    np.testing.assert_allclose(d.coefficients, np.linalg.svd(psi.reshape(2, 2), compute_uv=False), atol=1e-12)


@given(seeds, st.integers(0, 4))
def test_rank_nullity(seed, rank):
    m = la.random_psd(np.random.default_rng(seed), 4, rank) if rank else np.zeros((4, 4))
    assert len(la.kernel_basis(m)) + la.operator_rank(m) == 4
    assert la.operator_rank(m) == rank


def test_product_operator_examples():
    p0 = np.diag([1, 0]).astype(complex)
    ok, (a, b) = la.is_product_operator(np.kron(p0, np.eye(2)), with_factors=True)
    assert ok
    np.testing.assert_allclose(np.kron(a, b), np.kron(p0, np.eye(2)), atol=1e-12)
    assert not la.is_product_operator(np.outer(la.SINGLET, la.SINGLET.conj()))


@given(seeds)
def test_product_operator_factors_psd(seed):
    rng = np.random.default_rng(seed)
    a, b = la.random_psd(rng, 2, 1), la.random_psd(rng, 2, 2)
    ok, (fa, fb) = la.is_product_operator(np.kron(a, b), with_factors=True)
    assert ok
    np.testing.assert_allclose(np.kron(fa, fb), np.kron(a, b), atol=1e-9)
    assert np.linalg.eigvalsh(fa)[0] > -1e-9 and np.linalg.eigvalsh(fb)[0] > -1e-9


def test_partial_contraction_examples():
    v01 = np.kron(KET0, KET1)
    assert np.allclose(la.partial_contraction(v01, v01), 0)
    s = la.partial_contraction(la.SINGLET, la.SINGLET)
    np.testing.assert_allclose(s, -0.5 * np.eye(2), atol=1e-12)


@given(seeds)
def test_partial_contraction_entangled_nonzero(seed):
    rng = np.random.default_rng(seed)
    psi = la.random_state(rng)
    phi = np.kron(la.random_state(rng, 2), la.random_state(rng, 2))
    assert np.linalg.norm(la.partial_contraction(psi, phi)) > 1e-8
    assert np.linalg.norm(la.partial_contraction(phi, psi)) > 1e-8


def test_most_entangled_ising():
    zz = np.kron(la.PAULI["Z"], la.PAULI["Z"])
    af = la.kernel_basis(zz + np.eye(4))  # span{|01>, |10>}
    v, val = la.most_entangled_in_span(af)
    assert val == pytest.approx(0.5)
    np.testing.assert_allclose(np.abs(v), [0, 2 ** -0.5, 2 ** -0.5, 0], atol=1e-12)


@given(seeds, st.integers(2, 3))
def test_most_entangled_beats_samples(seed, k):
    rng = np.random.default_rng(seed)
    basis = list(la.random_unitary(rng, 4)[:, :k].T)
    _, best = la.most_entangled_in_span(basis)
    for _ in range(200):
        z = la.random_state(rng, k)
        s = la.schmidt_coefficients(np.column_stack(basis) @ z)
        assert s[0] * s[1] <= best + 1e-12


def test_swap_factors_involution(rng):
    m = la.random_psd(rng, 4, 4)
    np.testing.assert_allclose(la.swap_factors(la.swap_factors(m)), m)
    a, b = la.random_psd(rng, 2, 2), la.random_psd(rng, 2, 2)
    np.testing.assert_allclose(la.swap_factors(np.kron(a, b)), np.kron(b, a), atol=1e-12)
