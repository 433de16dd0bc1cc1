import numpy as np
import pytest
from hypothesis import given

from conftest import seeds
from ffspin import linalg as la
from ffspin.errors import InvalidHamiltonian, NotHermitian, NotRescaled
from ffspin.hamiltonian import (Hamiltonian, TwoSpinTerm, classify_naturality, projectorize,
                                rescale_to_zero_ground, substitute_nonnatural_rank2, validate)

ZZ = np.kron(la.PAULI["Z"], la.PAULI["Z"])


def test_rescale_zz():
    m = rescale_to_zero_ground(ZZ)
    np.testing.assert_allclose(np.diag(m).real, [2, 0, 0, 2])
    np.testing.assert_allclose(rescale_to_zero_ground(m), m)


@given(seeds)
def test_rescale_idempotent(seed):
    rng = np.random.default_rng(seed)
    m = la.random_psd(rng, 4, 4) - 3 * np.eye(4)
    once = rescale_to_zero_ground(m)
    assert np.linalg.eigvalsh(once)[0] == pytest.approx(0, abs=1e-9)
    np.testing.assert_allclose(rescale_to_zero_ground(once), once)


def test_projectorize_requires_rescaled():
    with pytest.raises(NotRescaled):
        projectorize(ZZ)
    p = projectorize(rescale_to_zero_ground(ZZ))
    np.testing.assert_allclose(p, np.diag([1, 0, 0, 1]), atol=1e-12)


def test_build_orientation_and_sum():
    a = np.kron(np.diag([1, 0]), np.eye(2)).astype(complex)
    h = Hamiltonian.build([0, 1], [(1, 0, a), (0, 1, a)], normalize=False)
    np.testing.assert_allclose(h.term(0, 1), la.swap_factors(a) + a)
    np.testing.assert_allclose(h.term(1, 0), a + la.swap_factors(a))


def test_build_rejects():
    with pytest.raises(InvalidHamiltonian):
        Hamiltonian.build([0, 1], [(0, 2, np.eye(4))])
    with pytest.raises(NotHermitian):
        Hamiltonian.build([0, 1], [(0, 1, np.triu(np.ones((4, 4))))])


def test_naturality_examples():
    singlet = np.outer(la.SINGLET, la.SINGLET.conj())
    assert classify_naturality(singlet).natural
    prod = np.kron(np.diag([0, 1]), np.eye(2)).astype(complex)
    v = classify_naturality(prod)
    assert v.rank == 2 and not v.natural
    assert classify_naturality(np.diag([0, 0, 0, 1]).astype(complex)).natural is False
    # rank 3 is always natural
    assert classify_naturality(np.diag([0, 1, 1, 1]).astype(complex)).natural


def test_substitute_nonnatural():
    phi = np.array([np.cos(0.4), np.sin(0.4)], dtype=complex)
    eta = la.random_psd(np.random.default_rng(0), 2, 2)
    t = TwoSpinTerm(0, 1, np.kron(np.outer(phi, phi.conj()), eta))
    s = substitute_nonnatural_rank2(t)
    assert s.vertex == 0
    ker = la.kernel_basis(s.matrix)
    assert len(ker) == 1 and abs(np.vdot(ker[0], phi)) < 1e-9


def test_validate_collects():
    h = Hamiltonian((0, 1, 2), {(0, 1): -np.eye(4)}, {})
    rep = validate(h)
    assert not rep.valid and not rep.connected and rep.warnings


def test_restrict_and_relabel():
    h = Hamiltonian.build(range(3), [(0, 1, ZZ), (1, 2, ZZ)])
    r = h.restrict([0, 1])
    assert list(r.edges) == [(0, 1)]
    m = h.relabel({0: 10, 1: 11, 2: 12})
    assert set(m.edges) == {(10, 11), (11, 12)}
