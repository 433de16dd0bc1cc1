"""Entanglement bounds across a bipartition (A, B).

Reducing only the terms inside A leaves a complete homogeneous Hamiltonian on
the surviving spins of A.  Each of its connected components of ñ_j spins has
a kernel of dimension ñ_j + 1, so any ground state has Schmidt rank at most
prod_j (ñ_j + 1) across the cut.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field

import networkx as nx
import numpy as np

from . import linalg as la
from .config import DEFAULT_TOL, Tolerances
from .errors import FrustratedSubsystem, InvalidConstants, NotContiguous
from .hamiltonian import Hamiltonian
from .reduction import Reduced, reduce_to_complete


@dataclass(frozen=True)
class Bipartition:
    a: frozenset
    b: frozenset
    boundary_edges: tuple
    components: tuple  # connected pieces of A in the interaction graph

    @property
    def boundary_spins(self) -> frozenset:
        """Spins of A adjacent to B."""
        return frozenset(e[0] if e[0] in self.a else e[1] for e in self.boundary_edges)


def bipartition(h: Hamiltonian, a) -> Bipartition:
    a = frozenset(a)
    verts = set(h.vertices)
    if not a or not a <= verts:
        raise ValueError("A must be a nonempty subset of the vertices")
    b = frozenset(verts - a)
    g = h.graph()
    boundary = tuple(sorted(e for e in h.edges if (e[0] in a) != (e[1] in a)))
    comps = sorted((frozenset(c) for c in nx.connected_components(g.subgraph(a))), key=min)
    return Bipartition(a, b, boundary, tuple(comps))


@dataclass(frozen=True, eq=False)
class SubsystemReduction:
    result: Reduced
    region: frozenset
    survivors: tuple  # spins of A left after the reduction
    components: tuple  # connected components of the reduced A (tuples of spins)

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.components]

    @property
    def n_tilde(self) -> int:
        return len(self.survivors)

    def internal(self) -> Hamiltonian:
        return self.result.hamiltonian.restrict(self.survivors)


def reduce_subsystem(h: Hamiltonian, a, tol: Tolerances = DEFAULT_TOL) -> SubsystemReduction:
    """Reduce the terms acting inside A only; cross terms are carried along."""
    a = frozenset(a)
    res = reduce_to_complete(h, region=a, tol=tol)
    if res.frustrated:
        raise FrustratedSubsystem(f"terms inside A are frustrated: {res.reason} at {res.location}")
    hc = res.hamiltonian
    surv = tuple(v for v in hc.vertices if v in a)
    g = nx.Graph()
    g.add_nodes_from(surv)
    g.add_edges_from(e for e in hc.edges if e[0] in a and e[1] in a)
    comps = tuple(tuple(sorted(c)) for c in sorted(nx.connected_components(g), key=min))
    return SubsystemReduction(res, a, surv, comps)


def schmidt_measure_bound(h: Hamiltonian, a, reduction: SubsystemReduction | None = None) -> float:
    """Sum over reduced components of log2(ñ_j + 1), in e-bits."""
    red = reduce_subsystem(h, a) if reduction is None else reduction
    return float(sum(np.log2(s + 1) for s in red.sizes))


# ---------------------------------------------------------------- lattice constants

@dataclass(frozen=True)
class LatticeConstants:
    c: float
    k: float
    provenance: str


def boundary_count(g: nx.Graph, s) -> int:
    s = set(s)
    return sum(1 for v in s if any(w not in s for w in g.neighbors(v)))


def _connected_subsets(g: nx.Graph, max_size: int):
    """Connected vertex subsets up to ``max_size`` (grown from their minimum vertex)."""
    order = {v: i for i, v in enumerate(sorted(g.nodes))}
    seen = set()
    for root in sorted(g.nodes):
        frontier = [frozenset([root])]
        while frontier:
            nxt = []
            for s in frontier:
                if s in seen:
                    continue
                seen.add(s)
                yield s
                if len(s) >= max_size:
                    continue
                for v in s:
                    for w in g.neighbors(v):
                        if w not in s and order[w] > order[root]:
                            nxt.append(s | {w})
            frontier = nxt


def lattice_constants(g: nx.Graph, c: float = 1.0, max_size: int = 10) -> LatticeConstants:
    """Tightest K with alpha(S) >= K |S|^c over connected proper subsets up to ``max_size``."""
    n = g.number_of_nodes()
    best = np.inf
    for s in _connected_subsets(g, min(max_size, n - 1)):
        if len(s) == n:
            continue
        best = min(best, boundary_count(g, s) / len(s) ** c)
    if not np.isfinite(best) or best <= 0:
        raise InvalidConstants("no valid K for this lattice")
    return LatticeConstants(c, float(best), f"enumerated connected subsets up to size {min(max_size, n - 1)}")


def default_exponent(dimension: int) -> float:
    """c = 1 for chains, (d - 1)/d for d-dimensional grids."""
    return 1.0 if dimension <= 1 else (dimension - 1) / dimension


# ---------------------------------------------------------------- bounds

@dataclass(frozen=True)
class AreaLawBound:
    value: float
    schmidt: float
    alpha: int
    boundary_edges: int
    alpha_over_k: float


def area_law_bound(h: Hamiltonian, a, constants: LatticeConstants,
                   reduction: SubsystemReduction | None = None) -> AreaLawBound:
    """min(sum_j log2(ñ_j + 1), alpha / K), after checking alpha_j >= K ñ_j^c."""
    bp = bipartition(h, a)
    red = reduce_subsystem(h, a) if reduction is None else reduction
    g = h.graph()
    for piece in bp.components:
        n_j = sum(len(c) for c in red.components if set(c) <= piece)
        a_j = boundary_count(g, piece) if bp.b else 0
        if n_j > 0 and a_j < constants.k * n_j ** constants.c - 1e-12:
            raise InvalidConstants(f"alpha={a_j} < K*n^c={constants.k * n_j ** constants.c:.3g} on a piece of A")
    alpha = len(bp.boundary_spins)
    sm = schmidt_measure_bound(h, a, red)
    ak = alpha / constants.k
    return AreaLawBound(min(sm, ak), sm, alpha, len(bp.boundary_edges), ak)


@dataclass(frozen=True)
class LogLawBound:
    value: float
    n_tilde: int
    boundary_form: float | None


def log_law_bound(h: Hamiltonian, a, constants: LatticeConstants | None = None,
                  reduction: SubsystemReduction | None = None) -> LogLawBound:
    """log2(ñ + 1) for a connected A, with the boundary form log2(alpha/K + 1)/c."""
    bp = bipartition(h, a)
    if len(bp.components) != 1:
        raise NotContiguous("A is not connected in the interaction graph")
    red = reduce_subsystem(h, a) if reduction is None else reduction
    nt = red.n_tilde
    form = None
    if constants is not None:
        form = float(np.log2(len(bp.boundary_spins) / constants.k + 1) / constants.c)
    return LogLawBound(float(np.log2(nt + 1)), nt, form)


@dataclass(frozen=True)
class HeavyBound:
    value: float
    beta: tuple  # heavy-component count per piece of A


def heavy_component_bound(h: Hamiltonian, a, tol: Tolerances = DEFAULT_TOL) -> HeavyBound:
    """Sum over pieces of A of log2(beta + 1), beta = components under rank >= 2 edges."""
    bp = bipartition(h, a)
    betas = []
    for piece in bp.components:
        g = nx.Graph()
        g.add_nodes_from(piece)
        for e, m in h.edges.items():
            if e[0] in piece and e[1] in piece and la.operator_rank(m, tol.rank) >= 2:
                g.add_edge(*e)
        betas.append(nx.number_connected_components(g))
    return HeavyBound(float(sum(np.log2(b + 1) for b in betas)), tuple(betas))


@dataclass(frozen=True)
class CascadeClassification:
    kind: str  # "NoCascade" | "SingleRank3" | "Frustrated"
    rank3_edges: tuple
    max_kernel_dim: int | None


def rank3_cascade_classify(h: Hamiltonian, tol: Tolerances = DEFAULT_TOL) -> CascadeClassification:
    """Verdict from the number of rank-3 terms in a connected natural Hamiltonian.

    One rank-3 term fixes a product state on its edge; in a connected natural
    instance this propagates to every spin, leaving at most one ground state.
    Two rank-3 terms generically over-determine the cascade.
    """
    r3 = tuple(e for e, r in h.ranks(tol).items() if r == 3)
    if not r3:
        return CascadeClassification("NoCascade", r3, None)
    if len(r3) == 1:
        return CascadeClassification("SingleRank3", r3, 1)
    return CascadeClassification("Frustrated", r3, 0)


# ---------------------------------------------------------------- report

@dataclass
class EntanglementReport:
    region: list
    sizes: list
    alpha: int
    boundary_edges: int
    schmidt_bound: float
    heavy_bound: float
    log_bound: float | None = None
    log_boundary_form: float | None = None
    area_bound: float | None = None
    constants: dict | None = None
    components: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, default=str)

    def table(self) -> str:
        rows = [("reduced sizes", self.sizes), ("boundary spins", self.alpha),
                ("boundary edges", self.boundary_edges),
                ("Schmidt-measure bound (e-bits)", f"{self.schmidt_bound:.4f}"),
                ("heavy-component bound", f"{self.heavy_bound:.4f}")]
        if self.log_bound is not None:
            rows.append(("log-law bound", f"{self.log_bound:.4f}"))
        if self.area_bound is not None:
            rows.append(("area-law bound", f"{self.area_bound:.4f}"))
        if self.constants:
            rows.append(("lattice constants (c, K)", f"({self.constants['c']:.3g}, {self.constants['k']:.3g})"))
        w = max(len(r[0]) for r in rows)
        return "\n".join(f"{k:<{w}}  {v}" for k, v in rows)


def entanglement_report(h: Hamiltonian, a, constants: LatticeConstants | None = None,
                        tol: Tolerances = DEFAULT_TOL) -> EntanglementReport:
    bp = bipartition(h, a)
    red = reduce_subsystem(h, a, tol)
    rep = EntanglementReport(
        region=sorted(bp.a, key=str), sizes=red.sizes, alpha=len(bp.boundary_spins),
        boundary_edges=len(bp.boundary_edges), schmidt_bound=schmidt_measure_bound(h, a, red),
        heavy_bound=heavy_component_bound(h, a, tol).value,
        components=[list(c) for c in red.components])
    if len(bp.components) == 1:
        lb = log_law_bound(h, a, constants, red)
        rep.log_bound, rep.log_boundary_form = lb.value, lb.boundary_form
    if constants is not None:
        rep.area_bound = area_law_bound(h, a, constants, red).value
        rep.constants = asdict(constants)
    return rep


# ---------------------------------------------------------------- regions

def intervals(n: int):
    """Proper contiguous intervals of a chain 0..n-1."""
    for i in range(n):
        for j in range(i + 1, n + 1):
            if j - i < n:
                yield tuple(range(i, j))


def rectangles(rows: int, cols: int):
    """Proper axis-aligned rectangles of a grid labelled row-major."""
    for r0, r1 in itertools.combinations(range(rows + 1), 2):
        for c0, c1 in itertools.combinations(range(cols + 1), 2):
            if (r1 - r0) * (c1 - c0) == rows * cols:
                continue
            yield tuple(r * cols + c for r in range(r0, r1) for c in range(c0, c1))
