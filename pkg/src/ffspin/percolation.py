"""Random product/entangled rank-1 terms on d-dimensional lattices.

Each edge carries a uniform variate from a counter-based generator keyed by
(seed, L, trial); the edge is entangled iff u < p.  Samples at different p
are therefore coupled and the entangled set grows monotonically with p.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .errors import InsufficientTrials


@dataclass(frozen=True)
class RandomLatticeConfig:
    d: int
    L: int
    p: float
    seed: int = 0
    periodic: bool = False

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.d < 1 or self.L < 2:
            raise ValueError("need d >= 1 and L >= 2")

    @property
    def n(self) -> int:
        return self.L ** self.d


def lattice_edges(d: int, L: int, periodic: bool = False) -> np.ndarray:
    """(m, 2) array of nearest-neighbour pairs, vertices in C order."""
    idx = np.arange(L ** d).reshape((L,) * d)
    out = []
    for axis in range(d):
        if periodic and L > 2:
            nb = np.roll(idx, -1, axis=axis)
            out.append(np.stack([idx.ravel(), nb.ravel()], axis=1))
        else:
            lo = np.take(idx, range(L - 1), axis=axis)
            hi = np.take(idx, range(1, L), axis=axis)
            out.append(np.stack([lo.ravel(), hi.ravel()], axis=1))
    e = np.concatenate(out)
    return np.sort(e, axis=1)


def edge_uniforms(cfg: RandomLatticeConfig, trial: int = 0, m: int | None = None) -> np.ndarray:
    m = len(lattice_edges(cfg.d, cfg.L, cfg.periodic)) if m is None else m
    ss = np.random.SeedSequence([cfg.seed, cfg.d, cfg.L, trial])
    return np.random.Generator(np.random.Philox(ss)).random(m)


def sample_lattice(cfg: RandomLatticeConfig, trial: int = 0) -> np.ndarray:
    """Boolean label per edge of :func:`lattice_edges`: True means entangled."""
    return edge_uniforms(cfg, trial) < cfg.p


@dataclass(frozen=True, eq=False)
class ClusterDecomposition:
    labels: np.ndarray
    sizes: np.ndarray  # descending

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return int(self.sizes.sum())


def clusters(n: int, edges: np.ndarray, entangled: np.ndarray) -> ClusterDecomposition:
    """Connected components under entangled edges; isolated spins are size-1 clusters."""
    e = np.asarray(edges)[np.asarray(entangled, bool)]
    g = sparse.coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])) if len(e) else ([], ([], [])), shape=(n, n))
    k, labels = connected_components(g, directed=False)
    sizes = np.sort(np.bincount(labels, minlength=k))[::-1]
    return ClusterDecomposition(labels, sizes)


@dataclass(frozen=True)
class DegeneracyEstimate:
    log2_bound: float
    largest_fraction: float
    density: float


def degeneracy_bound(dec: ClusterDecomposition) -> DegeneracyEstimate:
    """log2 dim M <= sum_j log2(|A_j| + 1)."""
    b = float(np.sum(np.log2(dec.sizes + 1.0)))
    return DegeneracyEstimate(b, float(dec.sizes[0] / dec.n), dec.k / dec.n)


# ---------------------------------------------------------------- Monte Carlo

@dataclass
class SizeSummary:
    L: int
    n: int
    trials: int
    kappa: float
    kappa_se: float
    theta: float
    theta_se: float
    bound_per_n: float
    bound_per_n_se: float
    mean_bound: float


@dataclass
class ScalingReport:
    d: int
    p: float
    seed: int
    rng: str
    sizes: list = field(default_factory=list)
    fit: dict | None = None
    rows: list = field(default_factory=list)  # (L, trial, k, |A_0|, bound)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["L", "trial", "k", "A0", "bound"])
        w.writerows(self.rows)
        return buf.getvalue()

    def to_json(self) -> str:
        d = {"d": self.d, "p": self.p, "seed": self.seed, "rng": self.rng,
             "sizes": [asdict(s) for s in self.sizes], "fit": self.fit}
        return json.dumps(d, indent=2)


def _mean_se(x) -> tuple[float, float]:
    x = np.asarray(x, float)
    return float(x.mean()), float(x.std(ddof=1) / np.sqrt(len(x))) if len(x) > 1 else 0.0


def monte_carlo_scaling(d: int, p: float, sizes, trials: int, seed: int = 0,
                        periodic: bool = False, min_trials: int = 30) -> ScalingReport:
    """Cluster density, largest-cluster fraction and degeneracy bound per lattice size.

    The mean bounds are fitted to a log2(n) + b n when at least two sizes are given.
    """
    if trials < min_trials:
        raise InsufficientTrials(f"{trials} trials < {min_trials}")
    rep = ScalingReport(d, p, seed, "Philox-4x64 (numpy), SeedSequence([seed, d, L, trial])")
    for L in sizes:
        cfg = RandomLatticeConfig(d, L, p, seed, periodic)
        edges = lattice_edges(d, L, periodic)
        ks, th, bd = [], [], []
        for t in range(trials):
            lab = edge_uniforms(cfg, t, len(edges)) < p
            dec = clusters(cfg.n, edges, lab)
            est = degeneracy_bound(dec)
            ks.append(est.density)
            th.append(est.largest_fraction)
            bd.append(est.log2_bound)
            rep.rows.append((L, t, dec.k, int(dec.sizes[0]), est.log2_bound))
        km, kse = _mean_se(ks)
        tm, tse = _mean_se(th)
        bm, bse = _mean_se(np.asarray(bd) / cfg.n)
        rep.sizes.append(SizeSummary(L, cfg.n, trials, km, kse, tm, tse, bm, bse, float(np.mean(bd))))
    if len(rep.sizes) >= 2:
        n = np.array([s.n for s in rep.sizes], float)
        y = np.array([s.mean_bound for s in rep.sizes])
        a, b = np.linalg.lstsq(np.column_stack([np.log2(n), n]), y, rcond=None)[0]
        rep.fit = {"a_log2n": float(a), "b_n": float(b)}
    return rep


@dataclass
class ThetaCurve:
    d: int
    L: int
    trials: int
    ps: np.ndarray
    theta: np.ndarray
    bound: np.ndarray  # mean log2 bound per p
    onset: float


def theta_curve(d: int, L: int, ps, trials: int, seed: int = 0, periodic: bool = False) -> ThetaCurve:
    """Coupled estimate of the largest-cluster fraction over a grid of p.

    The onset is the midpoint of the p-interval with the steepest rise in theta.
    """
    ps = np.sort(np.asarray(ps, float))
    edges = lattice_edges(d, L, periodic)
    n = L ** d
    theta = np.zeros(len(ps))
    bound = np.zeros(len(ps))
    for t in range(trials):
        u = edge_uniforms(RandomLatticeConfig(d, L, 0.0, seed, periodic), t, len(edges))
        for i, p in enumerate(ps):
            dec = clusters(n, edges, u < p)
            theta[i] += dec.sizes[0] / n
            bound[i] += degeneracy_bound(dec).log2_bound
    theta /= trials
    bound /= trials
    slope = np.diff(theta) / np.diff(ps)
    j = int(np.argmax(slope))
    return ThetaCurve(d, L, trials, ps, theta, bound, float((ps[j] + ps[j + 1]) / 2))
