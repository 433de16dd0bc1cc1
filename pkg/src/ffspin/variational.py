"""Variational energies of H0 + lam * H1 over the ground manifold of H0.

The manifold is ker(H0) = T (x)_c ker(component c of H_c).  Each term of H1
is pulled back through the network T and restricted to the component
kernels; terms that straddle two components are split by their
operator-Schmidt decomposition.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import FrustratedH0, TooLarge, UnsupportedPerturbation
from .groundspace import GroundSpace, _LocalOp, pull_back
from .hamiltonian import Hamiltonian, LocalObservable
from .reduction import reduce_to_complete

MAX_MANIFOLD_DIM = 4096


@dataclass(frozen=True, eq=False)
class PerturbedProblem:
    h0: Hamiltonian
    h1: Hamiltonian  # built with normalize=False to keep its spectrum
    lam: float


@dataclass(frozen=True, eq=False)
class VariationalResult:
    energy: float
    coefficients: np.ndarray
    hbar: np.ndarray  # restricted H1 (without lam)
    dims: tuple


def perturbation_terms(h1: Hamiltonian) -> list[LocalObservable]:
    terms = [LocalObservable((a, b), m) for (a, b), m in h1.edges.items()]
    terms += [LocalObservable((v,), m) for v, m in h1.singles.items()]
    return terms


def _embed(space: GroundSpace, blocks: dict) -> np.ndarray:
    """Kronecker product over components; missing ones get the identity."""
    out = np.ones((1, 1), dtype=complex)
    for i, c in enumerate(space.components):
        out = np.kron(out, blocks.get(i, np.eye(c.dim)))
    return out


def restrict_to_manifold(space: GroundSpace, omega: LocalObservable) -> np.ndarray:
    """Matrix of a (pulled-back) observable in the orthonormal manifold basis."""
    support, m = pull_back(space.result, omega, max_support=2)
    if not support:
        return complex(m.reshape(())) * np.eye(space.dim)
    groups: dict[int, list] = {}
    for v in support:
        groups.setdefault(space.component_of(v), []).append(v)
    op = _LocalOp(support, m)
    if len(groups) == 1:
        (ci, vs), = groups.items()
        op.permute(vs)
        return _embed(space, {ci: space.components[ci].restrict(op.matrix(), vs).matrix})
    (c1, v1), (c2, v2) = groups.items()
    op.permute(v1 + v2)
    d1, d2 = 2 ** len(v1), 2 ** len(v2)
    r = op.matrix().reshape(d1, d2, d1, d2).transpose(0, 2, 1, 3).reshape(d1 * d1, d2 * d2)
    u, s, vh = np.linalg.svd(r)
    total = np.zeros((space.dim, space.dim), dtype=complex)
    for k in range(len(s)):
        if s[k] <= 1e-14 * s[0]:
            break
        a = np.sqrt(s[k]) * u[:, k].reshape(d1, d1)
        b = np.sqrt(s[k]) * vh[k].reshape(d2, d2)
        total += _embed(space, {c1: _restrict_general(space, c1, a, v1),
                                c2: _restrict_general(space, c2, b, v2)})
    return (total + total.conj().T) / 2


def _restrict_general(space, ci, a, vs):
    """Restriction of a non-Hermitian factor via its Hermitian and anti-Hermitian parts."""
    comp = space.components[ci]
    h = (a + a.conj().T) / 2
    k = (a - a.conj().T) / 2j
    return comp.restrict(h, vs).matrix + 1j * comp.restrict(k, vs).matrix


def manifold_hamiltonian(space: GroundSpace, h1: Hamiltonian) -> np.ndarray:
    if space.dim > MAX_MANIFOLD_DIM:
        raise TooLarge(f"manifold dimension {space.dim} exceeds {MAX_MANIFOLD_DIM}")
    total = np.zeros((space.dim, space.dim), dtype=complex)
    for t in perturbation_terms(h1):
        if len(t.support) > 2:
            raise UnsupportedPerturbation("perturbation terms must act on at most two spins")
        total += restrict_to_manifold(space, t)
    return (total + total.conj().T) / 2


def variational_energy(prob: PerturbedProblem, tol: Tolerances = DEFAULT_TOL,
                       space: GroundSpace | None = None) -> VariationalResult:
    """min over the ground manifold of H0 of <H0 + lam H1>."""
    if space is None:
        res = reduce_to_complete(prob.h0, tol=tol)
        if res.frustrated:
            raise FrustratedH0(f"H0 is frustrated: {res.reason}")
        space = GroundSpace.from_result(res, tol=tol)
    hbar = manifold_hamiltonian(space, prob.h1)
    w, v = np.linalg.eigh(prob.lam * hbar)
    return VariationalResult(float(w[0]), v[:, 0], hbar, tuple(space.dims))
