import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import seeds
from ffspin import generators as gen
from ffspin import linalg as la
from ffspin.errors import TooLarge
from ffspin.hamiltonian import Hamiltonian
from ffspin.oracle import (build_full, incremental_kernel, lift, oracle, schmidt_rank_across,
                           sparse_full, spectrum_verdict)


def test_lift_matches_kron(rng):
    a = la.random_psd(rng, 4, 4)
    ref = np.kron(np.kron(np.eye(2), a), np.eye(2))
    np.testing.assert_allclose(lift(a, [1, 2], 4), ref)
    # reversed sites swap the tensor factors
    np.testing.assert_allclose(lift(a, [2, 1], 4), np.kron(np.kron(np.eye(2), la.swap_factors(a)), np.eye(2)))


@given(seeds)
def test_dense_equals_sparse(seed):
    h = gen.random_instance(5, seed, single_prob=0.3)
    np.testing.assert_allclose(build_full(h).matrix, sparse_full(h).toarray(), atol=1e-12)


def test_xx_cycle_oracle():
    d = oracle(gen.xx4cycle())
    assert d.frustration_free and d.kernel_dim == 2
    assert not oracle(gen.double_rank3()).frustration_free


@settings(max_examples=20)
@given(seeds)
def test_incremental_kernel_matches_full(seed):
    h = gen.mixed_ensemble(1, seed=seed, n_range=(3, 8))[0]
    v = spectrum_verdict(h)
    q = incremental_kernel(h)
    assert q.shape[1] == (v.kernel_dim if v.frustration_free else 0)
    if q.shape[1]:
        assert np.abs(build_full(h).matrix @ q).max() < 1e-8


def test_caps():
    h = gen.planted_complete(5, 0)
    with pytest.raises(TooLarge):
        build_full(h, cap=4)
    with pytest.raises(TooLarge):
        incremental_kernel(h, cap=4)


@given(st.integers(1, 5))
def test_schmidt_rank_of_products(k):
    v = np.zeros(2 ** 6, dtype=complex)
    v[0] = 1
    assert schmidt_rank_across(v, list(range(k)), 6) == 1
    ghz = v.copy()
    ghz[-1] = 1
    assert schmidt_rank_across(ghz / np.sqrt(2), list(range(k)), 6) == 2
