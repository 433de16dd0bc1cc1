"""2-local spin-1/2 Hamiltonians on graphs.

Terms are stored on canonically oriented edges ``(a, b)`` with ``a < b``
and the 4x4 operator in ``a (x) b`` order.  By default every term is
rescaled so that its minimum eigenvalue is zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

import networkx as nx
import numpy as np

from . import linalg as la
from .config import DEFAULT_TOL
from .errors import InvalidHamiltonian, NotApplicable, NotRescaled

Vertex = Hashable


def canonical_edge(a, b) -> tuple:
    if a == b:
        raise InvalidHamiltonian(f"self-loop on vertex {a!r}")
    return (a, b) if a < b else (b, a)


def oriented(matrix: np.ndarray, a, b) -> np.ndarray:
    """Matrix given in a (x) b order, returned in canonical order."""
    return matrix if a < b else la.swap_factors(matrix)


@dataclass(frozen=True)
class TwoSpinTerm:
    a: Vertex
    b: Vertex
    matrix: np.ndarray


@dataclass(frozen=True)
class SingleSpinTerm:
    vertex: Vertex
    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class LocalObservable:
    """Operator on a few named spins, tensor order following ``support``."""

    support: tuple
    matrix: np.ndarray

    def __post_init__(self):
        m = la.hermitian(self.matrix, dim=2 ** len(self.support))
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "support", tuple(self.support))
        if len(set(self.support)) != len(self.support):
            raise ValueError("repeated spin in observable support")


def rescale_to_zero_ground(term, tol=DEFAULT_TOL):
    """Shift a term by its minimum eigenvalue so the ground energy is zero.

    Accepts a raw matrix, a :class:`TwoSpinTerm` or a :class:`SingleSpinTerm`.
    A minimum eigenvalue already within tolerance of zero is left alone so
    that re-normalizing is a no-op.
    """
    if isinstance(term, TwoSpinTerm):
        return TwoSpinTerm(term.a, term.b, rescale_to_zero_ground(term.matrix, tol))
    if isinstance(term, SingleSpinTerm):
        return SingleSpinTerm(term.vertex, rescale_to_zero_ground(term.matrix, tol))
    m = la.hermitian(term, tol.herm)
    lam = np.linalg.eigvalsh(m)[0]
    if abs(lam) <= tol.rank * la.op_norm(m):
        return m
    return m - lam * np.eye(m.shape[0])


def _term_matrix(term):
    return term.matrix if isinstance(term, (TwoSpinTerm, SingleSpinTerm)) else np.asarray(term, complex)


def _check_rescaled(m: np.ndarray, tol=DEFAULT_TOL) -> None:
    w = np.linalg.eigvalsh(m)
    thr = tol.rank * la.op_norm(m)
    if w[0] < -thr or w[0] > thr:
        raise NotRescaled(f"minimum eigenvalue {w[0]:.3g} is not zero")


def projectorize(term, tol=DEFAULT_TOL):
    """Replace a rescaled term by the orthogonal projector onto its image."""
    m = la.hermitian(_term_matrix(term), tol.herm)
    _check_rescaled(m, tol)
    p = la.projector(la.image_basis(m, tol.rank))
    if p.size == 0:
        p = np.zeros_like(m)
    p = (p + p.conj().T) / 2
    if isinstance(term, TwoSpinTerm):
        return TwoSpinTerm(term.a, term.b, p)
    return p


@dataclass(frozen=True, eq=False)
class NaturalityVerdict:
    edge: tuple | None
    rank: int
    natural: bool
    witness: np.ndarray | None = None
    factors: tuple | None = None


def classify_naturality(term, tol=DEFAULT_TOL) -> NaturalityVerdict:
    """Decide whether a rescaled two-spin term has an entangled excited state."""
    edge = (term.a, term.b) if isinstance(term, TwoSpinTerm) else None
    m = la.hermitian(_term_matrix(term), tol.herm, dim=4)
    _check_rescaled(m, tol)
    r = la.operator_rank(m, tol.rank)
    if r == 0:
        return NaturalityVerdict(edge, 0, False)
    img = la.image_basis(m, tol.rank)
    if r == 1:
        v = img[0]
        ent = not la.is_product_state(v, tol.product)
        return NaturalityVerdict(edge, 1, ent, v if ent else None)
    if r == 2:
        prod, factors = la.is_product_operator(m, tol.rank, with_factors=True)
        if prod:
            return NaturalityVerdict(edge, 2, False, None, factors)
    v, _ = la.most_entangled_in_span(img)
    return NaturalityVerdict(edge, r, True, v)


def substitute_nonnatural_rank2(term: TwoSpinTerm, tol=DEFAULT_TOL) -> SingleSpinTerm:
    """Single-spin projector with the same kernel as |phi><phi| (x) eta."""
    verdict = classify_naturality(term, tol)
    if verdict.rank != 2 or verdict.natural:
        raise NotApplicable(f"term on {verdict.edge} is rank {verdict.rank}, natural={verdict.natural}")
    a_fac, b_fac = verdict.factors
    ra = la.operator_rank(a_fac, tol.rank)
    vertex, factor = (term.a, a_fac) if ra == 1 else (term.b, b_fac)
    phi = la.image_basis(factor, tol.rank)[0]
    return SingleSpinTerm(vertex, np.outer(phi, phi.conj()))


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    vertices: tuple
    edges: Mapping[tuple, np.ndarray] = field(default_factory=dict)
    singles: Mapping[Vertex, np.ndarray] = field(default_factory=dict)

    @classmethod
    def build(cls, vertices: Iterable, edges: Iterable = (), singles: Iterable = (),
              normalize: bool = True, check: bool = True, tol=DEFAULT_TOL) -> "Hamiltonian":
        """Construct from ``(a, b, matrix)`` and ``(v, matrix)`` iterables (or mappings).

        Duplicate terms on the same edge or vertex are summed before rescaling.
        """
        verts = tuple(sorted(set(vertices)))
        vset = set(verts)
        if isinstance(edges, Mapping):
            edges = [(a, b, m) for (a, b), m in edges.items()]
        if isinstance(singles, Mapping):
            singles = list(singles.items())
        acc: dict[tuple, np.ndarray] = {}
        for a, b, m in edges:
            m = la.hermitian(m, tol.herm, dim=4)
            if check and (a not in vset or b not in vset):
                raise InvalidHamiltonian(f"edge ({a!r}, {b!r}) references a missing vertex")
            e = canonical_edge(a, b)
            m = oriented(m, a, b)
            acc[e] = acc[e] + m if e in acc else m
        sacc: dict = {}
        for v, m in singles:
            m = la.hermitian(m, tol.herm, dim=2)
            if check and v not in vset:
                raise InvalidHamiltonian(f"single-spin term references missing vertex {v!r}")
            sacc[v] = sacc[v] + m if v in sacc else m
        if normalize:
            acc = {e: rescale_to_zero_ground(m, tol) for e, m in acc.items()}
            sacc = {v: rescale_to_zero_ground(m, tol) for v, m in sacc.items()}
        return cls(verts, dict(sorted(acc.items())), dict(sorted(sacc.items())))

    @property
    def n(self) -> int:
        return len(self.vertices)

    def term(self, a, b) -> np.ndarray:
        """Operator on (a, b) in a (x) b order."""
        m = self.edges[canonical_edge(a, b)]
        return m if a < b else la.swap_factors(m)

    def two_spin_terms(self) -> list[TwoSpinTerm]:
        return [TwoSpinTerm(a, b, m) for (a, b), m in self.edges.items()]

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(e for e, m in self.edges.items() if np.any(m != 0))
        return g

    def neighbors(self, v) -> list:
        return sorted({b if a == v else a for (a, b) in self.edges if v in (a, b)})

    def ranks(self, tol=DEFAULT_TOL) -> dict:
        return {e: la.operator_rank(m, tol.rank) for e, m in self.edges.items()}

    def restrict(self, vertices) -> "Hamiltonian":
        """Terms acting entirely inside ``vertices``."""
        vs = set(vertices)
        return Hamiltonian(tuple(sorted(vs)),
                           {e: m for e, m in self.edges.items() if e[0] in vs and e[1] in vs},
                           {v: m for v, m in self.singles.items() if v in vs})

    def relabel(self, mapping) -> "Hamiltonian":
        return Hamiltonian.build([mapping[v] for v in self.vertices],
                                 [(mapping[a], mapping[b], m) for (a, b), m in self.edges.items()],
                                 [(mapping[v], m) for v, m in self.singles.items()],
                                 normalize=False)

    def scaled(self, c: float) -> "Hamiltonian":
        return Hamiltonian(self.vertices, {e: c * m for e, m in self.edges.items()},
                           {v: c * m for v, m in self.singles.items()})

    def substituted(self, tol=DEFAULT_TOL) -> "Hamiltonian":
        """Replace every non-natural rank-2 term by its single-spin equivalent."""
        edges = {}
        singles = dict(self.singles)
        for (a, b), m in self.edges.items():
            v = classify_naturality(m, tol) if la.operator_rank(m, tol.rank) == 2 else None
            if v is not None and not v.natural:
                s = substitute_nonnatural_rank2(TwoSpinTerm(a, b, m), tol)
                singles[s.vertex] = singles.get(s.vertex, 0) + s.matrix
            else:
                edges[(a, b)] = m
        return Hamiltonian(self.vertices, edges, dict(sorted(singles.items())))

    def naturality(self, tol=DEFAULT_TOL) -> "NaturalityReport":
        verdicts = [classify_naturality(t, tol) for t in self.two_spin_terms()]
        connected = self.n <= 1 or nx.is_connected(self.graph())
        return NaturalityReport(verdicts, connected and all(v.natural for v in verdicts))


@dataclass(frozen=True)
class NaturalityReport:
    terms: list
    natural: bool


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    connected: bool = True

    @property
    def valid(self) -> bool:
        return not self.errors


def validate(h: Hamiltonian, tol=DEFAULT_TOL) -> ValidationReport:
    """Structural and spectral checks; failures are collected, never raised."""
    rep = ValidationReport()
    vs = set(h.vertices)
    for (a, b), m in h.edges.items():
        if a not in vs or b not in vs:
            rep.errors.append(f"edge ({a!r}, {b!r}) references a missing vertex")
        if a == b:
            rep.errors.append(f"self-loop on {a!r}")
        _spectral_checks(rep, f"edge ({a!r}, {b!r})", m, 4, tol)
    for v, m in h.singles.items():
        if v not in vs:
            rep.errors.append(f"single-spin term references missing vertex {v!r}")
        _spectral_checks(rep, f"vertex {v!r}", m, 2, tol)
    if h.n > 1:
        g = nx.Graph()
        g.add_nodes_from(h.vertices)
        g.add_edges_from(e for e in h.edges if e[0] in vs and e[1] in vs)
        rep.connected = nx.is_connected(g)
        if not rep.connected:
            rep.warnings.append("isolated subsystems: interaction graph is not connected")
    return rep


def _spectral_checks(rep, label, m, dim, tol):
    m = np.asarray(m, dtype=complex)
    if m.shape != (dim, dim):
        rep.errors.append(f"{label}: shape {m.shape}, expected {(dim, dim)}")
        return
    if np.max(np.abs(m - m.conj().T)) > tol.herm:
        rep.errors.append(f"{label}: not Hermitian")
        return
    w = np.linalg.eigvalsh((m + m.conj().T) / 2)
    if w[0] < -tol.rank * max(la.op_norm(m), 1e-300):
        rep.errors.append(f"{label}: not positive semidefinite after rescaling")
    elif w[0] > tol.rank * la.op_norm(m):
        rep.warnings.append(f"{label}: ground energy {w[0]:.3g} is not zero")
