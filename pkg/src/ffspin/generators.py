"""Instances with known ground truth, random ensembles and the worked examples.

Planted instances share a gauge {L_v}: a rank-1 "light" term on (a, b) is the
singlet constraint <Psi-|(L_a (x) L_b), so (x)_v L_v^{-1} applied to any
symmetric state lies in its kernel.  Heavier terms are built around the same
gauge so that (x)_v L_v^{-1}|0...0> stays a common zero-energy state.
"""
from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
import numpy as np

from . import linalg as la
from .hamiltonian import Hamiltonian

PROJ_XX = np.diag([1.0, 0.0, 0.0, 1.0]).astype(complex)


def rng_from(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_gauge(rng: np.random.Generator, cond_cap: float = 10.0) -> np.ndarray:
    """Random 2x2 operator with entries uniform in the unit disc, det 1, cond <= cap."""
    while True:
        r = np.sqrt(rng.uniform(size=(2, 2)))
        m = r * np.exp(2j * np.pi * rng.uniform(size=(2, 2)))
        if abs(np.linalg.det(m)) > 1e-3 and np.linalg.cond(m) <= cond_cap:
            return m / np.sqrt(np.linalg.det(m))


def singlet_constraint(la_op: np.ndarray, lb_op: np.ndarray) -> np.ndarray:
    """Unit vector beta with <beta| proportional to <Psi-|(L_a (x) L_b)."""
    beta = (la_op.T @ la.EPSILON @ lb_op).conj().reshape(4)
    return beta / np.linalg.norm(beta)


def light_term(la_op, lb_op) -> np.ndarray:
    b = singlet_constraint(la_op, lb_op)
    return np.outer(b, b.conj())


def _term_with_kernel(rng, kernel_vectors, scale_range=(0.5, 2.0)) -> np.ndarray:
    """Random PSD operator whose kernel is exactly the span of ``kernel_vectors``."""
    k = np.column_stack(kernel_vectors)
    q, _ = np.linalg.qr(k)
    comp = np.eye(4) - q @ q.conj().T
    basis = la.canonical_basis(comp)
    c = np.column_stack(basis)
    r = len(basis)
    a = la.random_psd(rng, r, r) + np.eye(r) * 0.1
    a = a / la.op_norm(a) * rng.uniform(*scale_range)
    m = c @ a @ c.conj().T
    return (m + m.conj().T) / 2


def lock_term(rng, la_op, lb_op) -> np.ndarray:
    """Rank-2 term killing (L_a^-1 (x) L_b^-1) span{|00>, |11>}."""
    ia, ib = np.linalg.inv(la_op), np.linalg.inv(lb_op)
    z0 = np.kron(ia[:, 0], ib[:, 0])
    z1 = np.kron(ia[:, 1], ib[:, 1])
    return _term_with_kernel(rng, [z0 / np.linalg.norm(z0), z1 / np.linalg.norm(z1)])


def seed_term(rng, la_op, lb_op) -> np.ndarray:
    """Rank-3 term whose kernel is (L_a^-1 (x) L_b^-1)|00>."""
    ia, ib = np.linalg.inv(la_op), np.linalg.inv(lb_op)
    z0 = np.kron(ia[:, 0], ib[:, 0])
    return _term_with_kernel(rng, [z0 / np.linalg.norm(z0)])


# ---------------------------------------------------------------- planted families

@dataclass(frozen=True, eq=False)
class PlantedInstance:
    hamiltonian: Hamiltonian
    gauge: dict
    kinds: dict  # edge -> "light" | "lock" | "seed"


def planted_complete(n: int, seed=None, cond_cap: float = 10.0, identity: bool = False,
                     return_gauge: bool = False):
    """Natural complete homogeneous Hamiltonian on n spins; dim ker = n + 1."""
    if n < 2:
        raise ValueError("need n >= 2")
    rng = rng_from(seed)
    gauge = {v: (np.eye(2, dtype=complex) if identity else random_gauge(rng, cond_cap)) for v in range(n)}
    edges = [(a, b, light_term(gauge[a], gauge[b])) for a in range(n) for b in range(a + 1, n)]
    h = Hamiltonian.build(range(n), edges)
    if return_gauge:
        return PlantedInstance(h, gauge, {(a, b): "light" for a, b, _ in edges})
    return h


def reverse_network_instance(graph: nx.Graph, seed=None, lock_fraction: float = 0.3,
                             seed_edges: int = 0, cond_cap: float = 10.0) -> PlantedInstance:
    """Frustration-free natural instance on ``graph`` with a planted gauge.

    Each edge carries a light, lock (rank 2) or seed (rank 3) term; all kill
    (x)_v L_v^{-1}|0...0>.  Lock edges contract in the reduction, leaving a
    tree network over the planted complete core.  The kernel dimension is
    not fixed by construction and should be taken from the oracle.
    """
    rng = rng_from(seed)
    verts = sorted(graph.nodes)
    gauge = {v: random_gauge(rng, cond_cap) for v in verts}
    edges = sorted(tuple(sorted(e)) for e in graph.edges)
    kinds = {}
    order = rng.permutation(len(edges))
    n_seed = min(seed_edges, len(edges))
    for rank_pos, i in enumerate(order):
        e = edges[i]
        if rank_pos < n_seed:
            kinds[e] = "seed"
        elif rng.uniform() < lock_fraction:
            kinds[e] = "lock"
        else:
            kinds[e] = "light"
    terms = []
    for (a, b) in edges:
        k = kinds[(a, b)]
        if k == "light":
            m = light_term(gauge[a], gauge[b])
        elif k == "lock":
            m = lock_term(rng, gauge[a], gauge[b])
        else:
            m = seed_term(rng, gauge[a], gauge[b])
        terms.append((a, b, m))
    return PlantedInstance(Hamiltonian.build(verts, terms), gauge, kinds)


# ---------------------------------------------------------------- random ensembles

def chain_graph(n: int) -> nx.Graph:
    return nx.path_graph(n)


def grid_graph(rows: int, cols: int) -> nx.Graph:
    g = nx.grid_2d_graph(rows, cols)
    return nx.convert_node_labels_to_integers(g, ordering="sorted")


def random_connected_graph(n: int, rng, extra: float = 0.3) -> nx.Graph:
    """Random spanning tree plus a fraction of extra edges."""
    g = nx.Graph()
    g.add_nodes_from(range(n))
    for v in range(1, n):
        g.add_edge(v, int(rng.integers(v)))
    others = [(a, b) for a in range(n) for b in range(a + 1, n) if not g.has_edge(a, b)]
    for i in rng.permutation(len(others))[: int(round(extra * len(others)))]:
        g.add_edge(*others[i])
    return g


def random_term(rng, rank: int) -> np.ndarray:
    return la.random_psd(rng, 4, rank) / 2


def random_instance(n: int, seed=None, ranks=(1, 2, 3), weights=None, extra: float = 0.2,
                    single_prob: float = 0.0, product_prob: float = 0.0) -> Hamiltonian:
    """Random 2-local instance on a random connected graph with mixed ranks."""
    rng = rng_from(seed)
    g = random_connected_graph(n, rng, extra)
    p = None if weights is None else np.asarray(weights, float) / np.sum(weights)
    edges = []
    for a, b in sorted(g.edges):
        r = int(rng.choice(ranks, p=p))
        if r == 1 and rng.uniform() < product_prob:
            v = np.kron(la.random_state(rng, 2), la.random_state(rng, 2))
            m = np.outer(v, v.conj())
        else:
            m = random_term(rng, r)
        edges.append((a, b, m))
    singles = []
    for v in range(n):
        if rng.uniform() < single_prob:
            s = la.random_state(rng, 2)
            singles.append((v, np.outer(s, s.conj())))
    return Hamiltonian.build(range(n), edges, singles)


def mixed_ensemble(count: int, seed=0, n_range=(3, 10)) -> list[Hamiltonian]:
    """Frustrated and unfrustrated instances from several families."""
    rng = rng_from(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        fam = i % 5
        if fam == 0:
            g = random_connected_graph(n, rng, 0.3)
            out.append(reverse_network_instance(g, rng, lock_fraction=0.3).hamiltonian)
        elif fam == 1:
            out.append(random_instance(n, rng, ranks=(1,), extra=0.3, product_prob=0.3))
        elif fam == 2:
            out.append(random_instance(n, rng, ranks=(1, 2), weights=(3, 1), extra=0.1, single_prob=0.1))
        elif fam == 3:
            out.append(random_instance(n, rng, ranks=(1, 2, 3), weights=(4, 2, 1), extra=0.0))
        else:
            g = random_connected_graph(n, rng, 0.2)
            inst = reverse_network_instance(g, rng, lock_fraction=0.2, seed_edges=int(rng.integers(0, 2)))
            h = inst.hamiltonian
            if rng.uniform() < 0.5:
                # perturb one term to break the planted solution
                e = list(h.edges)[int(rng.integers(len(h.edges)))]
                edges = dict(h.edges)
                edges[e] = edges[e] + random_term(rng, 1) * 0.5
                h = Hamiltonian.build(h.vertices, edges)
            out.append(h)
    return out


def cascade_instance(n: int, rank3_terms: int, seed=None, planted: bool = False) -> Hamiltonian:
    """Connected natural chain-like instance with a given number of rank-3 terms."""
    rng = rng_from(seed)
    g = random_connected_graph(n, rng, 0.1)
    if planted:
        return reverse_network_instance(g, rng, lock_fraction=0.2, seed_edges=rank3_terms).hamiltonian
    edges = sorted(g.edges)
    pos = set(int(i) for i in rng.choice(len(edges), size=rank3_terms, replace=False))
    terms = []
    for i, (a, b) in enumerate(edges):
        r = 3 if i in pos else int(rng.choice((1, 2)))
        terms.append((a, b, random_term(rng, r)))
    return Hamiltonian.build(range(n), terms)


def labeled_instance(graph: nx.Graph, entangled: dict, seed=None) -> Hamiltonian:
    """Rank-1 terms: random entangled constraint where labelled, product otherwise."""
    rng = rng_from(seed)
    terms = []
    for e in sorted(tuple(sorted(e)) for e in graph.edges):
        if entangled[e]:
            v = la.random_state(rng, 4)
        else:
            v = np.kron(la.random_state(rng, 2), la.random_state(rng, 2))
        terms.append((e[0], e[1], np.outer(v, v.conj())))
    return Hamiltonian.build(sorted(graph.nodes), terms)


# ---------------------------------------------------------------- worked examples

def xx4cycle() -> Hamiltonian:
    """Four-spin XX cycle with each term taken as |00><00| + |11><11|."""
    return Hamiltonian.build([1, 2, 3, 4], [(1, 2, PROJ_XX), (2, 3, PROJ_XX), (3, 4, PROJ_XX), (4, 1, PROJ_XX)])


def xx4cycle_raw() -> Hamiltonian:
    """The same cycle from the Pauli form (sx sx + sy sy)/2, rescaled."""
    x, y = la.PAULI["X"], la.PAULI["Y"]
    t = (np.kron(x, x) + np.kron(y, y)) / 2
    return Hamiltonian.build([1, 2, 3, 4], [(1, 2, t), (2, 3, t), (3, 4, t), (4, 1, t)])


def xx4cycle_isometry() -> np.ndarray:
    """|0> -> |01>, |1> -> |10> on spins (3, 4)."""
    r = np.zeros((4, 2), dtype=complex)
    r[1, 0] = 1.0
    r[2, 1] = 1.0
    return r


def ising_pair(antiferro: bool = True) -> Hamiltonian:
    z = la.PAULI["Z"]
    t = np.kron(z, z) * (1.0 if antiferro else -1.0)
    return Hamiltonian.build([0, 1], [(0, 1, t)])


def double_rank3(seed: int = 7) -> Hamiltonian:
    """Three-spin chain carrying two generic rank-3 terms."""
    rng = rng_from(seed)
    return Hamiltonian.build([0, 1, 2], [(0, 1, random_term(rng, 3)), (1, 2, random_term(rng, 3))])


def golden_examples() -> dict[str, Hamiltonian]:
    return {
        "xx4cycle": xx4cycle(),
        "ising-af-pair": ising_pair(True),
        "ising-f-pair": ising_pair(False),
        "double-rank3": double_rank3(),
    }
