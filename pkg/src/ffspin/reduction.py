"""Reduction of a 2-local Hamiltonian to a complete homogeneous one.

The driver repeatedly deletes spins carrying single-spin terms, contracts
edges whose term has rank 2 or 3, and induces rank-1 constraints through
shared middle spins until the rank-1 constraint set is closed.  Every
state-changing step is recorded so the run can be replayed exactly and the
isometries reassembled into a tree tensor network.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator

import networkx as nx
import numpy as np

from . import linalg as la
from .config import DEFAULT_TOL, Tolerances
from .errors import (DimensionMismatch, NoEntangledBasisVector, NoSuchTerm,
                     RankMismatch, ReductionLivelock)
from .hamiltonian import Hamiltonian, canonical_edge, classify_naturality

I2 = np.eye(2, dtype=complex)


# ---------------------------------------------------------------- step records

@dataclass(frozen=True, eq=False)
class Substitution:
    """Non-natural rank-2 edge term replaced by a single-spin projector."""

    a: object
    b: object
    vertex: object
    state: np.ndarray  # excited single-spin state |phi>

    kind = "substitute"


@dataclass(frozen=True, eq=False)
class SpinDeletion:
    vertex: object
    state: np.ndarray

    kind = "delete"


@dataclass(frozen=True, eq=False)
class TwoSpinContraction:
    survivor: object
    removed: object
    isometry: np.ndarray  # 4x2, columns psi_0, psi_1 in survivor (x) removed order

    kind = "contract"

    @property
    def psi0(self) -> np.ndarray:
        return self.isometry[:, 0]

    @property
    def psi1(self) -> np.ndarray:
        return self.isometry[:, 1]


@dataclass(frozen=True, eq=False)
class ConstraintInduction:
    """Rank-1 constraint on (a, c) induced through middle spin b.

    ``constraint`` is stored in canonical (min, max) tensor order.
    ``accumulated`` marks that an existing, non-colinear term was present.
    """

    a: object
    b: object
    c: object
    constraint: np.ndarray
    accumulated: bool

    kind = "induce"


Step = Substitution | SpinDeletion | TwoSpinContraction | ConstraintInduction


# ---------------------------------------------------------------- working state

class _Work:
    """Mutable copy of a Hamiltonian used while reducing."""

    def __init__(self, h: Hamiltonian, tol: Tolerances):
        self.vertices = set(h.vertices)
        self.order = list(h.vertices)
        self.edges = {e: np.array(m, dtype=complex) for e, m in h.edges.items()}
        self.singles = {v: np.array(m, dtype=complex) for v, m in h.singles.items()}
        self.adj: dict = defaultdict(set)
        for a, b in self.edges:
            self.adj[a].add(b)
            self.adj[b].add(a)
        norms = [la.op_norm(m) for m in self.edges.values()] + [la.op_norm(m) for m in self.singles.values()]
        self.scale = max(norms, default=1.0) or 1.0
        self.floor = tol.zero * self.scale
        self.tol = tol
        self._ranks: dict = {}

    # edges
    def term(self, a, b) -> np.ndarray:
        m = self.edges[canonical_edge(a, b)]
        return m if a < b else la.swap_factors(m)

    def has_edge(self, a, b) -> bool:
        return canonical_edge(a, b) in self.edges

    def set_edge(self, a, b, m):
        e = canonical_edge(a, b)
        m = m if a < b else la.swap_factors(m)
        m = (m + m.conj().T) / 2
        self._ranks.pop(e, None)
        if np.max(np.abs(m)) <= self.floor:
            self.drop_edge(*e)
            return
        self.edges[e] = m
        self.adj[e[0]].add(e[1])
        self.adj[e[1]].add(e[0])

    def drop_edge(self, a, b):
        e = canonical_edge(a, b)
        self._ranks.pop(e, None)
        if self.edges.pop(e, None) is not None:
            self.adj[a].discard(b)
            self.adj[b].discard(a)

    def rank(self, e) -> int:
        r = self._ranks.get(e)
        if r is None:
            r = la.operator_rank(self.edges[e], self.tol.rank, self.floor)
            self._ranks[e] = r
        return r

    # singles
    def add_single(self, v, m):
        m = self.singles[v] + m if v in self.singles else m
        m = (m + m.conj().T) / 2
        if np.max(np.abs(m)) <= self.floor:
            self.singles.pop(v, None)
        else:
            self.singles[v] = m

    def remove_vertex(self, v):
        for a in list(self.adj[v]):
            self.drop_edge(a, v)
        self.adj.pop(v, None)
        self.singles.pop(v, None)
        self.vertices.discard(v)

    def freeze(self) -> Hamiltonian:
        verts = tuple(v for v in self.order if v in self.vertices)
        return Hamiltonian(verts, dict(sorted(self.edges.items())), dict(sorted(self.singles.items())))


def _apply(w: _Work, step) -> None:
    if isinstance(step, SpinDeletion):
        _apply_deletion(w, step.vertex, step.state)
    elif isinstance(step, TwoSpinContraction):
        _apply_contraction(w, step.survivor, step.removed, step.isometry)
    elif isinstance(step, ConstraintInduction):
        _apply_induction(w, step)
    elif isinstance(step, Substitution):
        w.drop_edge(step.a, step.b)
        w.add_single(step.vertex, np.outer(step.state, step.state.conj()))
    else:  # pragma: no cover
        raise TypeError(f"unknown step {step!r}")


def _apply_deletion(w: _Work, v, psi):
    psi = np.asarray(psi, dtype=complex)
    w.singles.pop(v, None)
    for a in sorted(w.adj[v]):
        t = w.term(a, v).reshape(2, 2, 2, 2)
        w.add_single(a, np.einsum("aibj,i,j->ab", t, psi.conj(), psi))
    w.remove_vertex(v)


def _apply_contraction(w: _Work, u, v, iso):
    iso = np.asarray(iso, dtype=complex)
    big = np.zeros((4, 4), dtype=complex)
    if u in w.singles:
        big += np.kron(w.singles.pop(u), I2)
    if v in w.singles:
        big += np.kron(I2, w.singles.pop(v))
    if w.has_edge(u, v):
        big += w.term(u, v)
        w.drop_edge(u, v)
    lift = np.kron(I2, iso)  # (a, u, v) <- (a, u)
    for a in sorted((w.adj[u] | w.adj[v]) - {u, v}):
        t = np.zeros((8, 8), dtype=complex)
        if w.has_edge(a, u):
            t += np.kron(w.term(a, u), I2)
        if w.has_edge(a, v):
            tav = w.term(a, v).reshape(2, 2, 2, 2)
            t += np.einsum("aibj,uv->auibvj", tav, I2).reshape(8, 8)
        w.drop_edge(a, u)
        w.drop_edge(a, v)
        w.set_edge(a, u, lift.conj().T @ t @ lift)
    w.remove_vertex(v)
    single = iso.conj().T @ big @ iso
    if np.max(np.abs(single)) > w.floor:
        w.add_single(u, single)


def _apply_induction(w: _Work, step: ConstraintInduction):
    e = canonical_edge(step.a, step.c)
    p = np.outer(step.constraint, step.constraint.conj())
    if e in w.edges:
        w.set_edge(e[0], e[1], w.edges[e] + p)
    else:
        w.set_edge(e[0], e[1], p)


# ---------------------------------------------------------------- elementary operations

def induce_constraint(beta_ab, beta_bc, tol: Tolerances = DEFAULT_TOL):
    """Constraint on (a, c) implied by rank-1 constraints on (a, b) and (b, c).

    Vectors are in a (x) b and b (x) c order; the result is in a (x) c order,
    normalized, or ``None`` when the contraction vanishes.
    """
    ab = np.asarray(beta_ab, dtype=complex).reshape(-1)
    bc = np.asarray(beta_bc, dtype=complex).reshape(-1)
    if ab.shape != (4,) or bc.shape != (4,):
        raise DimensionMismatch("constraints must be two-spin vectors")
    m = ab.reshape(2, 2) @ la.EPSILON @ bc.reshape(2, 2)
    nrm = np.linalg.norm(m)
    scale = np.linalg.norm(ab) * np.linalg.norm(bc)
    if scale == 0 or nrm <= tol.rank * scale:
        return None
    return (m / nrm).reshape(4)


def _colinear(beta, vec, tol: Tolerances) -> bool:
    return abs(np.vdot(beta, vec)) ** 2 > 1.0 - tol.colinear


def accumulate_term(existing, induced, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Add the projector onto ``induced`` to ``existing`` unless colinear with a rank-1 term."""
    v = np.asarray(induced, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    p = np.outer(v, v.conj())
    if existing is None:
        return p
    existing = la.hermitian(existing, dim=4)
    if la.operator_rank(existing, tol.rank) == 1:
        beta = la.image_basis(existing, tol.rank)[0]
        if _colinear(beta, v, tol):
            return existing
    return existing + p


def contraction_isometry(term: np.ndarray, require_entangled: bool = False,
                         tol: Tolerances = DEFAULT_TOL, floor: float = 0.0) -> np.ndarray:
    """4x2 isometry whose image contains ker(term); second column entangled when possible."""
    r = la.operator_rank(term, tol.rank, floor)
    if r not in (2, 3):
        raise RankMismatch(f"contraction needs rank 2 or 3, got {r}")
    ker = la.kernel_basis(term, tol.rank, floor)
    if r == 2:
        psi1, val = la.most_entangled_in_span(ker)
        if val <= tol.product:
            if require_entangled:
                raise NoEntangledBasisVector("kernel of the contracted term is spanned by product states")
            psi0, psi1 = ker
        else:
            psi0 = la.orthogonal_in_plane(ker[0], ker[1], psi1)
    else:
        psi0 = ker[0]
        comp = la.canonical_basis(np.eye(4) - np.outer(psi0, psi0.conj()))
        psi1, _ = la.most_entangled_in_span(comp)
    return np.column_stack([psi0, psi1])


def _check_isometry(iso, term, tol, floor):
    iso = np.asarray(iso, dtype=complex)
    if iso.shape != (4, 2):
        raise DimensionMismatch(f"isometry must be 4x2, got {iso.shape}")
    if np.max(np.abs(iso.conj().T @ iso - np.eye(2))) > tol.norm:
        raise ValueError("supplied map is not an isometry")
    p = iso @ iso.conj().T
    for k in la.kernel_basis(term, tol.rank, floor):
        if np.linalg.norm(k - p @ k) > 1e-8:
            raise ValueError("isometry image does not contain the kernel of the term")
    return iso


def contract_two_spin(h: Hamiltonian, edge, isometry=None, require_entangled: bool = False,
                      tol: Tolerances = DEFAULT_TOL):
    """Contract ``edge = (u, v)`` into spin ``u``.  Returns ``(H', record)``."""
    u, v = edge
    e = canonical_edge(u, v)
    if e not in h.edges:
        raise NoSuchTerm(f"no term on {edge}")
    w = _Work(h, tol)
    term = w.term(u, v)
    r = la.operator_rank(term, tol.rank, w.floor)
    if r not in (2, 3):
        raise RankMismatch(f"contraction needs rank 2 or 3, got {r}")
    if isometry is None:
        iso = contraction_isometry(term, require_entangled, tol, w.floor)
    else:
        iso = _check_isometry(isometry, term, tol, w.floor)
    step = TwoSpinContraction(u, v, iso)
    _apply(w, step)
    return w.freeze(), step


def delete_spin(h: Hamiltonian, v, tol: Tolerances = DEFAULT_TOL):
    """Fix spin ``v`` to the kernel of its single-spin term.

    Returns ``(H', record)`` or a :class:`Frustrated` result when the term is full rank.
    """
    if v not in h.singles:
        raise NoSuchTerm(f"no single-spin term on {v!r}")
    w = _Work(h, tol)
    m = w.singles[v]
    r = la.operator_rank(m, tol.rank, w.floor)
    if r == 2:
        return Frustrated("full-rank single-spin term", (v,), ())
    if r == 0:
        w.singles.pop(v)
        return w.freeze(), None
    step = SpinDeletion(v, la.kernel_basis(m, tol.rank, w.floor)[0])
    _apply(w, step)
    return w.freeze(), step


# ---------------------------------------------------------------- network

@dataclass(frozen=True, eq=False)
class TreeTensorNetwork:
    """Isometries and fixed states recorded during a reduction.

    ``steps`` are the contraction and deletion records in reduction order;
    ``free`` are the surviving spins (inputs), ``outputs`` the original spins.
    """

    outputs: tuple
    free: tuple
    steps: tuple = ()

    def graph(self) -> nx.DiGraph:
        """Directed forest from inputs and step nodes to output legs."""
        g = nx.DiGraph()
        holder = {v: ("out", v) for v in self.outputs}
        g.add_nodes_from(holder.values())
        for i, s in enumerate(self.steps):
            g.add_node(i, kind=s.kind)
            if isinstance(s, TwoSpinContraction):
                g.add_edge(i, holder[s.survivor])
                g.add_edge(i, holder.pop(s.removed))
                holder[s.survivor] = i
            else:
                g.add_edge(i, holder.pop(s.vertex))
        for v in self.free:
            g.add_edge(("in", v), holder[v])
        return g

    def is_forest(self) -> bool:
        g = self.graph()
        return nx.is_forest(g.to_undirected()) and all(d <= 1 for _, d in g.in_degree())

    def apply(self, phi) -> np.ndarray:
        return replay_network(self, phi)


def replay_network(network: TreeTensorNetwork, phi) -> np.ndarray:
    """Map a state (or columns of states) on the free spins to the original spins.

    Tensor order of the input follows ``network.free``; the output follows
    ``network.outputs``.
    """
    phi = np.asarray(phi, dtype=complex)
    vec = phi.ndim == 1
    mat = phi.reshape(-1, 1) if vec else phi
    nf = len(network.free)
    if mat.shape[0] != 2 ** nf:
        raise DimensionMismatch(f"expected dimension {2 ** nf}, got {mat.shape[0]}")
    k = mat.shape[1]
    labels = list(network.free)
    t = mat.reshape([2] * nf + [k])
    for s in reversed(network.steps):
        if isinstance(s, TwoSpinContraction):
            i = labels.index(s.survivor)
            iso = s.isometry.reshape(2, 2, 2)  # (u, v, x)
            t = np.tensordot(iso, t, axes=([2], [i]))  # u, v, rest...
            rest = labels[:i] + labels[i + 1:]
            labels = [s.survivor, s.removed] + rest
        else:
            t = np.multiply.outer(np.asarray(s.state, dtype=complex), t)
            labels = [s.vertex] + labels
    perm = [labels.index(v) for v in network.outputs] + [len(labels)]
    out = np.transpose(t, perm).reshape(2 ** len(network.outputs), k)
    return out[:, 0] if vec else out


# ---------------------------------------------------------------- results

@dataclass(frozen=True, eq=False)
class Frustrated:
    reason: str
    location: tuple
    trace: tuple = ()

    frustrated = True


@dataclass(frozen=True, eq=False)
class Reduced:
    hamiltonian: Hamiltonian
    network: TreeTensorNetwork
    trace: tuple = ()
    source: Hamiltonian | None = None

    frustrated = False

    @property
    def n_c(self) -> int:
        return self.hamiltonian.n


def _build_network(h: Hamiltonian, final: Hamiltonian, trace) -> TreeTensorNetwork:
    steps = tuple(s for s in trace if isinstance(s, (TwoSpinContraction, SpinDeletion)))
    return TreeTensorNetwork(tuple(h.vertices), tuple(final.vertices), steps)


# ---------------------------------------------------------------- driver

def _pick(items, rng):
    if rng is None:
        return items[0]
    return items[int(rng.integers(len(items)))]


def _coefficient_cache(w: _Work, region) -> dict:
    beta = {}
    for e, m in w.edges.items():
        if e[0] in region and e[1] in region:
            vals, vecs = np.linalg.eigh(m)
            beta[e] = vecs[:, -1]
    return beta


def _coeff(beta, a, b) -> np.ndarray:
    m = beta[canonical_edge(a, b)].reshape(2, 2)
    return m if a < b else m.T


def _induction_sweep(w: _Work, region, rng, trace, tol) -> str:
    """One pass over middle spins.  Returns 'closed', 'grew' or 'heavy'."""
    beta = _coefficient_cache(w, region)
    grew = False
    middles = sorted(v for v in w.vertices if v in region)
    if rng is not None:
        middles = [middles[i] for i in rng.permutation(len(middles))]
    for b in middles:
        nbrs = sorted(x for x in w.adj[b] if x in region)
        pairs = [(nbrs[i], nbrs[j]) for i in range(len(nbrs)) for j in range(i + 1, len(nbrs))]
        if rng is not None:
            pairs = [pairs[i] for i in rng.permutation(len(pairs))]
        for a, c in pairs:
            if canonical_edge(a, b) not in beta or canonical_edge(b, c) not in beta:
                continue
            m = _coeff(beta, a, b) @ la.EPSILON @ _coeff(beta, b, c)
            nrm = np.linalg.norm(m)
            if nrm <= tol.rank:
                continue
            m = m / nrm
            e = canonical_edge(a, c)
            vec = (m if a < c else m.T).reshape(4)
            if e in w.edges:
                if e in beta and _colinear(beta[e], vec, tol):
                    continue
                step = ConstraintInduction(a, b, c, vec, True)
                _apply(w, step)
                trace.append(step)
                return "heavy"
            step = ConstraintInduction(a, b, c, vec, False)
            _apply(w, step)
            trace.append(step)
            beta[e] = vec
            grew = True
    return "grew" if grew else "closed"


def reduce_to_complete(h: Hamiltonian, region=None, rng: np.random.Generator | None = None,
                       substitute_nonnatural: bool = True, require_entangled: bool = False,
                       tol: Tolerances = DEFAULT_TOL):
    """Reduce ``h`` to a complete homogeneous Hamiltonian or certify frustration.

    With ``region`` only spins and terms inside it are reduced; terms crossing
    the boundary are transformed along.  ``rng`` randomizes every choice of
    step; the default order is deterministic.
    """
    region = set(h.vertices) if region is None else set(region)
    w = _Work(h, tol)
    trace: list = []

    def inside(e):
        return e[0] in region and e[1] in region

    if substitute_nonnatural:
        for e in sorted(e for e in w.edges if inside(e)):
            if w.rank(e) != 2:
                continue
            verdict = classify_naturality(w.edges[e], tol)
            if verdict.natural:
                continue
            a_fac, b_fac = verdict.factors
            if la.operator_rank(a_fac, tol.rank) == 1:
                vertex, fac = e[0], a_fac
            else:
                vertex, fac = e[1], b_fac
            step = Substitution(e[0], e[1], vertex, la.image_basis(fac, tol.rank)[0])
            _apply(w, step)
            trace.append(step)

    n = max(len(region & w.vertices), 2)
    cap = 10 * n ** 3
    inductions = 0
    while True:
        singles = sorted(v for v in w.singles if v in region)
        if singles:
            v = _pick(singles, rng)
            m = w.singles[v]
            r = la.operator_rank(m, tol.rank, w.floor)
            if r == 2:
                return Frustrated("full-rank single-spin term", (v,), tuple(trace))
            step = SpinDeletion(v, la.kernel_basis(m, tol.rank, w.floor)[0])
            _apply(w, step)
            trace.append(step)
            continue
        internal = sorted(e for e in w.edges if inside(e))
        full = [e for e in internal if w.rank(e) == 4]
        if full:
            return Frustrated("full-rank two-spin term", full[0], tuple(trace))
        heavy = [e for e in internal if w.rank(e) in (2, 3)]
        if heavy:
            e = _pick(heavy, rng)
            u, v = e if rng is None or rng.integers(2) == 0 else (e[1], e[0])
            iso = contraction_isometry(w.term(u, v), require_entangled, tol, w.floor)
            step = TwoSpinContraction(u, v, iso)
            _apply(w, step)
            trace.append(step)
            continue
        status = _induction_sweep(w, region, rng, trace, tol)
        if status == "closed":
            break
        inductions += 1
        if inductions > cap:
            raise ReductionLivelock(f"no closure after {cap} induction sweeps")
    final = w.freeze()
    return Reduced(final, _build_network(h, final, trace), tuple(trace), h)


# ---------------------------------------------------------------- replay and serialization

def replay_trace(h: Hamiltonian, trace, tol: Tolerances = DEFAULT_TOL) -> Hamiltonian:
    """Apply recorded steps to ``h``; reproduces the reduction bit for bit."""
    w = _Work(h, tol)
    for s in trace:
        _apply(w, s)
    return w.freeze()


def iter_intermediate(h: Hamiltonian, trace, tol: Tolerances = DEFAULT_TOL) -> Iterator[Hamiltonian]:
    """Yield the Hamiltonian after each step (the input first)."""
    w = _Work(h, tol)
    yield w.freeze()
    for s in trace:
        _apply(w, s)
        yield w.freeze()


def _enc(a) -> list:
    a = np.asarray(a, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in a]


def _dec(x, shape) -> np.ndarray:
    return np.array([complex(re, im) for re, im in x], dtype=complex).reshape(shape)


def step_to_dict(s) -> dict:
    if isinstance(s, SpinDeletion):
        return {"kind": s.kind, "vertex": s.vertex, "state": _enc(s.state)}
    if isinstance(s, TwoSpinContraction):
        return {"kind": s.kind, "survivor": s.survivor, "removed": s.removed, "isometry": _enc(s.isometry)}
    if isinstance(s, ConstraintInduction):
        return {"kind": s.kind, "a": s.a, "b": s.b, "c": s.c, "constraint": _enc(s.constraint),
                "accumulated": s.accumulated}
    if isinstance(s, Substitution):
        return {"kind": s.kind, "a": s.a, "b": s.b, "vertex": s.vertex, "state": _enc(s.state)}
    raise TypeError(f"unknown step {s!r}")


def step_from_dict(d: dict):
    k = d["kind"]
    if k == "delete":
        return SpinDeletion(d["vertex"], _dec(d["state"], (2,)))
    if k == "contract":
        return TwoSpinContraction(d["survivor"], d["removed"], _dec(d["isometry"], (4, 2)))
    if k == "induce":
        return ConstraintInduction(d["a"], d["b"], d["c"], _dec(d["constraint"], (4,)), bool(d["accumulated"]))
    if k == "substitute":
        return Substitution(d["a"], d["b"], d["vertex"], _dec(d["state"], (2,)))
    raise ValueError(f"unknown step kind {k!r}")


def trace_to_json(trace) -> str:
    return json.dumps([step_to_dict(s) for s in trace])


def trace_from_json(text: str) -> tuple:
    return tuple(step_from_dict(d) for d in json.loads(text))
