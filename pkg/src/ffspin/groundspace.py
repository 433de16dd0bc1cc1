"""Kernels of complete homogeneous Hamiltonians and observables on them.

A connected natural complete component is gauge-equivalent to the all-singlet
model: every constraint satisfies conj(B_uv) = lam * L_u^T eps L_v, and its
kernel is (x)_v L_v^{-1} applied to the symmetric subspace.  Product vectors
(x)_v L_v^{-1} alpha_j for n_c + 1 pairwise independent seeds alpha_j span it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx
import numpy as np
from scipy.special import comb

from . import linalg as la
from .config import DEFAULT_TOL, Tolerances, max_oracle_spins
from .errors import (DependentSeeds, FrustratedInput, GramSingular, Inconsistent,
                     NotNatural, ObservableTooLarge, TooLarge)
from .hamiltonian import Hamiltonian, LocalObservable, canonical_edge
from .reduction import Reduced, SpinDeletion, TwoSpinContraction

I2 = np.eye(2, dtype=complex)
EPS_INV = np.linalg.inv(la.EPSILON)


# ---------------------------------------------------------------- gauge

@dataclass(frozen=True, eq=False)
class GaugeSolution:
    vertices: tuple
    operators: dict  # v -> L_v, det(L_v) = 1
    scalars: dict  # canonical edge -> lambda
    anchor: object

    def inverse(self, v) -> np.ndarray:
        return np.linalg.inv(self.operators[v])


def _constraint(m: np.ndarray, tol: Tolerances) -> np.ndarray:
    vals, vecs = np.linalg.eigh(m)
    if la.operator_rank(m, tol.rank) != 1:
        raise NotNatural("component is not homogeneous")
    return vecs[:, -1]


def solve_gauge(hc: Hamiltonian, tol: Tolerances = DEFAULT_TOL) -> GaugeSolution:
    """Gauge operators for a connected natural complete homogeneous Hamiltonian."""
    verts = tuple(hc.vertices)
    if hc.singles:
        raise NotNatural("single-spin terms present")
    anchor = verts[0]
    ops = {anchor: I2.copy()}
    coeff = {}
    for e, m in hc.edges.items():
        beta = _constraint(m, tol)
        if la.is_product_state(beta, tol.product):
            raise NotNatural(f"product constraint on {e}")
        coeff[e] = beta.reshape(2, 2)

    def b(u, v):
        c = coeff[canonical_edge(u, v)]
        return c if u < v else c.T

    for v in verts[1:]:
        if canonical_edge(anchor, v) not in coeff:
            raise Inconsistent(f"pair ({anchor!r}, {v!r}) carries no term; component is not complete")
        lv = EPS_INV @ b(anchor, v).conj()
        lv = lv / np.sqrt(np.linalg.det(lv))
        ops[v] = lv
    scalars = {}
    for i, u in enumerate(verts):
        for v in verts[i + 1:]:
            e = (u, v) if u < v else (v, u)
            if e not in coeff:
                raise Inconsistent(f"pair {e} carries no term; component is not complete")
            target = b(u, v).conj()
            model = ops[u].T @ la.EPSILON @ ops[v]
            lam = np.vdot(model, target) / np.vdot(model, model)
            res = np.linalg.norm(target - lam * model) / np.linalg.norm(target)
            if res > tol.gauge_residual:
                raise Inconsistent(f"gauge residual {res:.2e} on {e}")
            scalars[e] = complex(lam if u < v else -lam)
    return GaugeSolution(verts, ops, dict(sorted(scalars.items())), anchor)


# ---------------------------------------------------------------- bases

@dataclass(frozen=True, eq=False)
class SymmetricBasis:
    n: int
    vectors: np.ndarray  # columns W_0..W_n


def symmetric_basis(n: int) -> SymmetricBasis:
    if n < 1:
        raise ValueError("need at least one spin")
    dim = 2 ** n
    weights = np.array([bin(i).count("1") for i in range(dim)])
    w = np.zeros((dim, n + 1))
    for k in range(n + 1):
        w[weights == k, k] = 1.0 / np.sqrt(comb(n, k, exact=True))
    return SymmetricBasis(n, w.astype(complex))


def default_seeds(count: int) -> list[np.ndarray]:
    """Equatorial states with phases at the count-th roots of unity."""
    ph = np.exp(2j * np.pi * np.arange(count) / count)
    return [np.array([1.0, z]) / np.sqrt(2) for z in ph]


def _herm_fn(a: np.ndarray, f) -> np.ndarray:
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return (v * f(w)) @ v.conj().T


def adapted_seeds(gauge: GaugeSolution, count: int) -> list[np.ndarray]:
    """Equatorial seeds mapped through M = A^{-1/2}, A the log-mean of the site metrics.

    Site vectors are L_v^{-1} alpha_j, whose overlaps are measured by the metric
    A_v = L_v^{-dag} L_v^{-1}.  Pre-whitening the seeds by a common mean of
    the A_v keeps the product Gram matrix well conditioned; with L_v = 1 the
    seeds reduce to :func:`default_seeds`.
    """
    logs = []
    for v in gauge.vertices:
        li = gauge.inverse(v)
        a = li.conj().T @ li
        logs.append(_herm_fn(a / np.sqrt(np.linalg.det(a).real), np.log))
    m = _herm_fn(np.mean(logs, axis=0), lambda w: np.exp(-w / 2))
    return [_unit(m @ s) for s in default_seeds(count)]


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _check_seeds(seeds, tol: Tolerances):
    seeds = [np.asarray(s, dtype=complex) / np.linalg.norm(s) for s in seeds]
    for i in range(len(seeds)):
        for j in range(i + 1, len(seeds)):
            if abs(np.linalg.det(np.column_stack([seeds[i], seeds[j]]))) <= 1e-9:
                raise DependentSeeds(f"seeds {i} and {j} are linearly dependent")
    return seeds


def _orthonormalizer(gram: np.ndarray, tol: Tolerances):
    d, u = np.linalg.eigh((gram + gram.conj().T) / 2)
    if d[0] < tol.gram:
        raise GramSingular(f"Gram eigenvalue {d[0]:.2e} below {tol.gram:.0e}")
    return u, d


@dataclass(frozen=True, eq=False)
class RestrictedObservable:
    matrix: np.ndarray
    u: np.ndarray
    delta: np.ndarray


class ProductBasis:
    """Kernel of one natural complete component spanned by product vectors."""

    def __init__(self, gauge: GaugeSolution, seeds=None, tol: Tolerances = DEFAULT_TOL):
        n = len(gauge.vertices)
        seeds = adapted_seeds(gauge, n + 1) if seeds is None else seeds
        if len(seeds) != n + 1:
            raise ValueError(f"need {n + 1} seeds, got {len(seeds)}")
        self.seeds = _check_seeds(seeds, tol)
        self.gauge = gauge
        self.vertices = gauge.vertices
        self.tol = tol
        # column j of site v is L_v^{-1} alpha_j, normalized
        alpha = np.column_stack(self.seeds)
        self.sites = {}
        for v in self.vertices:
            s = gauge.inverse(v) @ alpha
            self.sites[v] = s / np.linalg.norm(s, axis=0)
        self._overlap = {v: s.conj().T @ s for v, s in self.sites.items()}
        self.gram = np.prod(np.stack(list(self._overlap.values())), axis=0)
        self.u, self.delta = _orthonormalizer(self.gram, tol)

    @property
    def dim(self) -> int:
        return len(self.seeds)

    def vectors(self) -> np.ndarray:
        """Dense product vectors as columns, tensor order of ``vertices``."""
        out = np.ones((1, self.dim), dtype=complex)
        for v in self.vertices:
            s = self.sites[v]
            out = np.einsum("aj,bj->abj", out, s).reshape(-1, self.dim)
        return out

    def orthonormal(self) -> np.ndarray:
        """Columns vectors() G^{-1/2}, polished by a polar step.

        A small Gram eigenvalue costs digits in G^{-1/2}; the polar factor is
        the nearest exactly orthonormal frame to the computed one.
        """
        x = self.vectors() @ self.u / np.sqrt(self.delta)
        w, _, vh = np.linalg.svd(x, full_matrices=False)
        return w @ vh

    def weight(self, omega: np.ndarray, support) -> np.ndarray:
        """W(Omega)_jk = <Phi_j| Omega |Phi_k> for an operator on ``support``."""
        support = list(support)
        rest = [v for v in self.vertices if v not in support]
        w = np.ones((self.dim, self.dim), dtype=complex)
        for v in rest:
            w = w * self._overlap[v]
        if support:
            loc = np.ones((1, self.dim), dtype=complex)
            for v in support:
                loc = np.einsum("aj,bj->abj", loc, self.sites[v]).reshape(-1, self.dim)
            w = w * (loc.conj().T @ omega @ loc)
        return w

    def restrict(self, omega: np.ndarray, support) -> RestrictedObservable:
        w = self.weight(omega, support)
        s = self.u / np.sqrt(self.delta)
        m = s.conj().T @ w @ s
        return RestrictedObservable((m + m.conj().T) / 2, self.u, self.delta)

    def reduced_density(self, support) -> np.ndarray:
        """Reduced state on ``support`` of the maximally mixed kernel state."""
        rest = [v for v in self.vertices if v not in support]
        w = np.ones((self.dim, self.dim), dtype=complex)
        for v in rest:
            w = w * self._overlap[v]
        ginv = self.u @ np.diag(1.0 / self.delta) @ self.u.conj().T
        loc = np.ones((1, self.dim), dtype=complex)
        for v in support:
            loc = np.einsum("aj,bj->abj", loc, self.sites[v]).reshape(-1, self.dim)
        # rho = sum_jk Ginv_jk |phi_j><phi_k| <phi_k|phi_j>_rest
        coeff = ginv * w.T
        rho = loc @ coeff @ loc.conj().T / self.dim
        return (rho + rho.conj().T) / 2


def product_basis(gauge: GaugeSolution, seeds=None, tol: Tolerances = DEFAULT_TOL) -> ProductBasis:
    return ProductBasis(gauge, seeds, tol)


def restrict_observable(omega, basis, support=None) -> RestrictedObservable:
    """Matrix of ``omega`` in an orthonormal basis of the component kernel.

    ``omega`` may be a :class:`LocalObservable` or a matrix with ``support``.
    """
    if isinstance(omega, LocalObservable):
        support, omega = omega.support, omega.matrix
    return basis.restrict(np.asarray(omega, dtype=complex), support)


class DenseBasis:
    """Kernel of a component found by exact diagonalization (fallback)."""

    def __init__(self, hc: Hamiltonian, tol: Tolerances = DEFAULT_TOL, cap: int | None = None):
        from .oracle import lift, oracle

        cap = max_oracle_spins() if cap is None else cap
        if hc.n > cap:
            raise TooLarge(f"non-natural component of {hc.n} spins exceeds the dense cap {cap}")
        self.vertices = tuple(hc.vertices)
        data = oracle(hc, tol.rank, cap)
        if not data.frustration_free:
            raise FrustratedInput("component has no zero-energy states")
        self.basis = data.basis
        self._lift = lift

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def orthonormal(self) -> np.ndarray:
        return self.basis

    def restrict(self, omega: np.ndarray, support) -> RestrictedObservable:
        idx = [self.vertices.index(v) for v in support]
        om = self._lift(omega, idx, len(self.vertices))
        m = self.basis.conj().T @ om @ self.basis
        return RestrictedObservable((m + m.conj().T) / 2, np.eye(self.dim), np.ones(self.dim))

    def reduced_density(self, support) -> np.ndarray:
        n = len(self.vertices)
        idx = [self.vertices.index(v) for v in support]
        rest = [i for i in range(n) if i not in idx]
        t = self.basis.reshape([2] * n + [self.dim]).transpose(idx + rest + [n])
        t = t.reshape(2 ** len(idx), -1)
        rho = t @ t.conj().T / self.dim
        return (rho + rho.conj().T) / 2


class TrivialBasis:
    """A free spin with no terms: the whole single-spin space."""

    def __init__(self, v):
        self.vertices = (v,)

    dim = 2

    def orthonormal(self) -> np.ndarray:
        return I2.copy()

    def restrict(self, omega, support) -> RestrictedObservable:
        m = np.asarray(omega, dtype=complex) if support else np.asarray(omega) * I2
        return RestrictedObservable(m, I2, np.ones(2))

    def reduced_density(self, support) -> np.ndarray:
        return I2 / 2 if support else np.ones((1, 1))


# ---------------------------------------------------------------- ground space

def component_basis(hc: Hamiltonian, seeds=None, tol: Tolerances = DEFAULT_TOL):
    """Best available kernel description for one connected component."""
    if hc.n == 1 and not hc.edges and not hc.singles:
        return TrivialBasis(hc.vertices[0])
    try:
        return ProductBasis(solve_gauge(hc, tol), seeds, tol)
    except (NotNatural, Inconsistent, GramSingular):
        return DenseBasis(hc, tol)


@dataclass(eq=False)
class GroundSpace:
    """ker(H) described as the network image of a product of component kernels."""

    result: Reduced
    components: list = field(default_factory=list)

    @classmethod
    def from_result(cls, result, seeds=None, tol: Tolerances = DEFAULT_TOL) -> "GroundSpace":
        if getattr(result, "frustrated", True):
            raise FrustratedInput("Hamiltonian is frustrated")
        hc = result.hamiltonian
        g = hc.graph()
        comps = []
        for c in sorted(nx.connected_components(g), key=lambda c: min(hc.vertices.index(v) for v in c)):
            sub = hc.restrict(c)
            sub = Hamiltonian(tuple(v for v in hc.vertices if v in c), sub.edges, sub.singles)
            comps.append(component_basis(sub, seeds, tol))
        return cls(result, comps)

    @property
    def dims(self) -> list[int]:
        return [c.dim for c in self.components]

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims)) if self.components else 1

    def component_of(self, v) -> int:
        for i, c in enumerate(self.components):
            if v in c.vertices:
                return i
        raise KeyError(v)

    def kernel_basis_hc(self) -> np.ndarray:
        """Orthonormal basis of ker(H_c) in the tensor order of H_c's vertices."""
        order = []
        out = np.ones((1, 1), dtype=complex)
        for c in self.components:
            out = np.kron(out, c.orthonormal())
            order.extend(c.vertices)
        n = len(order)
        target = list(self.result.hamiltonian.vertices)
        if n == 0:
            return out
        t = out.reshape([2] * n + [out.shape[1]])
        perm = [order.index(v) for v in target] + [n]
        return t.transpose(perm).reshape(2 ** n, -1)

    def ground_basis(self) -> np.ndarray:
        """Orthonormal basis of ker(H) on the original spins (small n only)."""
        return self.result.network.apply(self.kernel_basis_hc())

    def expectation(self, omega: LocalObservable, max_support: int = 4) -> float:
        return expectation_ground_manifold(self.result, omega, max_support=max_support, space=self)


# ---------------------------------------------------------------- pulling back observables

class _LocalOp:
    """Operator tensor with named legs: axes are out(labels) then in(labels)."""

    def __init__(self, labels, matrix):
        self.labels = list(labels)
        k = len(self.labels)
        self.t = np.asarray(matrix, dtype=complex).reshape([2] * (2 * k)) if k else np.asarray(matrix, complex).reshape(())

    @property
    def k(self):
        return len(self.labels)

    def matrix(self) -> np.ndarray:
        d = 2 ** self.k
        return self.t.reshape(d, d)

    def add_identity(self, label):
        k = self.k
        t = np.multiply.outer(self.t, I2)  # out(k), in(k), new_out, new_in
        perm = list(range(k)) + [2 * k] + list(range(k, 2 * k)) + [2 * k + 1]
        self.t = t.transpose(perm)
        self.labels.append(label)

    def contract_state(self, label, psi):
        k = self.k
        p = self.labels.index(label)
        t = np.tensordot(psi.conj(), self.t, axes=([0], [p]))  # out p removed
        t = np.tensordot(t, psi, axes=([k - 1 + p], [0]))  # in p is at k-1+p now
        self.t = t
        self.labels.pop(p)

    def conjugate_isometry(self, u, v, iso):
        """Omega <- U^dag Omega U with U: u -> (u, v); leg u kept, leg v removed."""
        for lab in (u, v):
            if lab not in self.labels:
                self.add_identity(lab)
        k = self.k
        pu, pv = self.labels.index(u), self.labels.index(v)
        iso3 = iso.reshape(2, 2, 2)  # (u, v, x)
        # out legs: contract with conj(U)
        t = np.tensordot(iso3.conj(), self.t, axes=([0, 1], [pu, pv]))  # x, remaining...
        rest_out = [i for i in range(k) if i not in (pu, pv)]
        # t axes: x_out, out(rest), in(all k)
        in_u, in_v = 1 + len(rest_out) + pu, 1 + len(rest_out) + pv
        t = np.tensordot(t, iso3, axes=([in_u, in_v], [0, 1]))  # ..., x_in at end
        labels_rest = [self.labels[i] for i in rest_out]
        # current axes: x_out, out(rest), in(rest), x_in ; reorder to labels [u] + rest
        m = len(rest_out)
        perm = [0] + list(range(1, 1 + m)) + [1 + 2 * m] + list(range(1 + m, 1 + 2 * m))
        self.t = t.transpose(perm)
        self.labels = [u] + labels_rest

    def permute(self, order):
        perm = [self.labels.index(v) for v in order]
        k = self.k
        self.t = self.t.transpose(perm + [k + p for p in perm])
        self.labels = list(order)


def pull_back(result: Reduced, omega: LocalObservable, max_support: int | None = None):
    """T^dag Omega T as an operator on surviving spins of H_c.

    Returns ``(support, matrix)``; support may be empty (a scalar).
    """
    op = _LocalOp(omega.support, omega.matrix)
    for s in result.network.steps:
        if isinstance(s, SpinDeletion):
            if s.vertex in op.labels:
                op.contract_state(s.vertex, np.asarray(s.state, complex))
        elif isinstance(s, TwoSpinContraction):
            if s.survivor in op.labels or s.removed in op.labels:
                op.conjugate_isometry(s.survivor, s.removed, np.asarray(s.isometry, complex))
        if max_support is not None and op.k > max_support:
            raise ObservableTooLarge(f"pulled-back support grew to {op.k}")
    order = [v for v in result.hamiltonian.vertices if v in op.labels]
    op.permute(order)
    return tuple(order), op.matrix()


def expectation_ground_manifold(result, omega: LocalObservable, max_support: int = 4,
                                space: GroundSpace | None = None) -> float:
    """Average of ``omega`` over the maximally mixed state on ker(H)."""
    if getattr(result, "frustrated", True):
        raise FrustratedInput("Hamiltonian is frustrated")
    if len(omega.support) > max_support:
        raise ObservableTooLarge(f"support {len(omega.support)} exceeds {max_support}")
    space = GroundSpace.from_result(result) if space is None else space
    support, m = pull_back(result, omega, max_support)
    if not support:
        return float(np.real(m.reshape(())))
    # reduced state on the support is a product over components
    groups: dict[int, list] = {}
    for v in support:
        groups.setdefault(space.component_of(v), []).append(v)
    order = []
    rho = np.ones((1, 1), dtype=complex)
    for ci, vs in groups.items():
        rho = np.kron(rho, space.components[ci].reduced_density(vs))
        order.extend(vs)
    op = _LocalOp(support, m)
    op.permute(order)
    return float(np.real(np.trace(op.matrix() @ rho)))
