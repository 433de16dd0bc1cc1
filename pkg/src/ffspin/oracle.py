"""Dense exact diagonalization used as ground truth for small instances."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .config import max_oracle_spins
from .errors import TooLarge
from .hamiltonian import Hamiltonian


@dataclass(frozen=True, eq=False)
class DenseHamiltonian:
    vertices: tuple
    matrix: np.ndarray

    @property
    def n(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True, eq=False)
class GroundData:
    energy: float
    kernel_dim: int
    basis: np.ndarray  # columns span the zero-energy eigenspace (ground space if frustrated)
    projector: np.ndarray
    frustration_free: bool
    threshold: float
    spectrum: np.ndarray


def _lift_entries(op: np.ndarray, sites, n: int):
    """Row, column and value arrays of ``op`` on ``sites`` embedded in n spins."""
    k = len(sites)
    op = np.asarray(op, dtype=complex).reshape(2 ** k, 2 ** k)
    x = np.arange(2 ** n)
    shifts = [n - 1 - s for s in sites]  # site 0 is the most significant bit
    local = np.zeros_like(x)
    mask = 0
    for p, sh in enumerate(shifts):
        local |= ((x >> sh) & 1) << (k - 1 - p)
        mask |= 1 << sh
    base = x & ~mask
    rows, cols, vals = [], [], []
    for out in range(2 ** k):
        y = base.copy()
        for p, sh in enumerate(shifts):
            y |= ((out >> (k - 1 - p)) & 1) << sh
        v = op[out, local]
        nz = v != 0
        rows.append(y[nz])
        cols.append(x[nz])
        vals.append(v[nz])
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def lift(op: np.ndarray, sites, n: int, dense: bool = True):
    """Embed an operator on ``sites`` (in that tensor order) into n spins."""
    r, c, v = _lift_entries(op, list(sites), n)
    m = sparse.csr_matrix((v, (r, c)), shape=(2 ** n, 2 ** n))
    return m.toarray() if dense else m


def build_full(h: Hamiltonian, cap: int | None = None) -> DenseHamiltonian:
    cap = max_oracle_spins() if cap is None else cap
    if h.n > cap:
        raise TooLarge(f"{h.n} spins exceeds the oracle cap of {cap}")
    idx = {v: i for i, v in enumerate(h.vertices)}
    n = h.n
    d = np.zeros((2 ** n, 2 ** n), dtype=complex)
    terms = [(m, [idx[a], idx[b]]) for (a, b), m in h.edges.items()]
    terms += [(m, [idx[v]]) for v, m in h.singles.items()]
    for m, sites in terms:
        r, c, v = _lift_entries(m, sites, n)
        d[r, c] += v  # (r, c) pairs are distinct within one term
    d = (d + d.conj().T) / 2
    return DenseHamiltonian(tuple(h.vertices), d)


def ground_data(dense: DenseHamiltonian, tau: float = 1e-9) -> GroundData:
    """Full eigendecomposition; eigenvalues at most tau * ||D|| count as zero."""
    w, v = np.linalg.eigh(dense.matrix)
    norm = float(np.max(np.abs(w))) if w.size else 0.0
    thr = tau * norm if norm > 0 else tau
    ff = bool(w[0] <= thr)
    if ff:
        sel = w <= thr
    else:
        sel = w <= w[0] + thr
    basis = v[:, sel]
    return GroundData(float(w[0]), int(np.sum(w <= thr)), basis,
                      basis @ basis.conj().T, ff, thr, w)


@dataclass(frozen=True)
class Verdict:
    energy: float
    kernel_dim: int
    frustration_free: bool
    threshold: float


def spectrum_verdict(h: Hamiltonian, tau: float = 1e-9, cap: int | None = None) -> Verdict:
    """Frustration verdict and kernel dimension from eigenvalues alone."""
    w = np.linalg.eigvalsh(build_full(h, cap).matrix)
    norm = float(np.max(np.abs(w))) if w.size else 0.0
    thr = tau * norm if norm > 0 else tau
    return Verdict(float(w[0]), int(np.sum(w <= thr)), bool(w[0] <= thr), thr)


def sparse_full(h: Hamiltonian) -> sparse.csr_matrix:
    idx = {v: i for i, v in enumerate(h.vertices)}
    out = sparse.csr_matrix((2 ** h.n, 2 ** h.n), dtype=complex)
    for (a, b), m in h.edges.items():
        out = out + lift(m, [idx[a], idx[b]], h.n, dense=False)
    for v, m in h.singles.items():
        out = out + lift(m, [idx[v]], h.n, dense=False)
    return out


def incremental_kernel(h: Hamiltonian, tau: float = 1e-9, cap: int = 16) -> np.ndarray:
    """Orthonormal basis of the joint zero space of all terms.

    Spins are added one at a time; the candidate space is the kernel found
    so far tensored with the new spin, and the terms that close on the new
    spin are imposed by diagonalizing their compression.  Exact for
    frustration-free inputs and much cheaper than full diagonalization
    when the kernel stays small.
    """
    if h.n > cap:
        raise TooLarge(f"{h.n} spins exceeds the incremental cap of {cap}")
    verts = list(h.vertices)
    pos = {v: i for i, v in enumerate(verts)}
    scale = sum(np.linalg.norm(m, 2) for m in h.edges.values()) + sum(
        np.linalg.norm(m, 2) for m in h.singles.values())
    thr = tau * scale if scale > 0 else tau
    q = np.ones((1, 1), dtype=complex)
    for k, v in enumerate(verts):
        q = np.kron(q, np.eye(2, dtype=complex))
        m = np.zeros((q.shape[1], q.shape[1]), dtype=complex)
        for (a, b), t in h.edges.items():
            if v in (a, b) and max(pos[a], pos[b]) == k:
                hq = lift(t, [pos[a], pos[b]], k + 1, dense=False) @ q
                m += q.conj().T @ hq
        if v in h.singles:
            m += q.conj().T @ (lift(h.singles[v], [k], k + 1, dense=False) @ q)
        if not np.any(m):
            continue
        w, vec = np.linalg.eigh((m + m.conj().T) / 2)
        q = q @ vec[:, w <= thr]
        if q.shape[1] == 0:
            return q
        q, _ = np.linalg.qr(q)
    return q


def oracle(h: Hamiltonian, tau: float = 1e-9, cap: int | None = None) -> GroundData:
    return ground_data(build_full(h, cap), tau)


def schmidt_rank_across(psi, subset_idx, n: int, tau: float = 1e-9) -> int:
    """Schmidt rank of an n-spin vector across (subset, complement), by index."""
    psi = np.asarray(psi, dtype=complex).reshape([2] * n)
    a = sorted(subset_idx)
    b = [i for i in range(n) if i not in a]
    m = psi.transpose(a + b).reshape(2 ** len(a), 2 ** len(b))
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > tau))


def ground_expectation(h: Hamiltonian, support, matrix, tau: float = 1e-9, data: GroundData | None = None) -> float:
    """tr(P0 Omega) / tr(P0) for the zero-energy (or lowest) eigenspace."""
    data = oracle(h, tau) if data is None else data
    idx = {v: i for i, v in enumerate(h.vertices)}
    om = lift(matrix, [idx[v] for v in support], h.n)
    b = data.basis
    return float(np.real(np.trace(b.conj().T @ om @ b)) / b.shape[1])
