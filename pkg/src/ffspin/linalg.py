"""Small dense complex linear algebra on one- and two-spin spaces.

Everything here works on numpy arrays: 2x2 single-spin operators, 4x4
two-spin operators in ``a (x) b`` tensor order, and 4-vectors whose
coefficient matrix is ``psi.reshape(2, 2)[a, b]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL
from .errors import DimensionMismatch, NotHermitian, NotPSD

# antisymmetric two-spin state (|01> - |10>)/sqrt(2) as a coefficient matrix
EPSILON = np.array([[0.0, 1.0], [-1.0, 0.0]]) / np.sqrt(2.0)
SINGLET = EPSILON.reshape(4).astype(complex)

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def as_matrix(m, dim=None) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise DimensionMismatch(f"expected {dim}x{dim}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def hermitian(m, tol: float = DEFAULT_TOL.herm, dim=None) -> np.ndarray:
    """Validate Hermiticity and return the symmetrized matrix."""
    m = as_matrix(m, dim)
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > tol:
        raise NotHermitian(f"max |M - M^dagger| = {dev:.3g} exceeds {tol:.1g}")
    return (m + m.conj().T) / 2


def op_norm(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def rank_threshold(m: np.ndarray, tau: float, floor: float = 0.0) -> float:
    return max(tau * op_norm(m), floor)


def operator_rank(m, tau: float = DEFAULT_TOL.rank, floor: float = 0.0) -> int:
    """Number of eigenvalues with |lambda| > tau * ||M|| (and above ``floor``)."""
    m = hermitian(m)
    w = np.linalg.eigvalsh(m)
    thr = rank_threshold(m, tau, floor)
    if thr == 0.0:
        return int(np.count_nonzero(w))
    return int(np.sum(np.abs(w) > thr))


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first non-negligible amplitude is real positive."""
    v = np.asarray(v, dtype=complex)
    scale = np.max(np.abs(v)) if v.size else 0.0
    if scale == 0.0:
        return v
    idx = int(np.argmax(np.abs(v) > 1e-9 * scale))
    return v * (abs(v[idx]) / v[idx])


def canonical_basis(projector: np.ndarray, tau: float = 1e-9) -> list[np.ndarray]:
    """Deterministic orthonormal basis of ``img(projector)``.

    Gram-Schmidt over the projected standard basis vectors, so the first
    vector has maximal overlap with |0...0>.
    """
    dim = projector.shape[0]
    basis: list[np.ndarray] = []
    for k in range(dim):
        v = projector[:, k].astype(complex).copy()
        for b in basis:
            v -= b * np.vdot(b, v)
        nv = np.linalg.norm(v)
        if nv > 1e-6:
            # second pass for numerical orthogonality
            v /= nv
            for b in basis:
                v -= b * np.vdot(b, v)
            basis.append(fix_phase(v / np.linalg.norm(v)))
    return basis


def kernel_basis(m, tau: float = DEFAULT_TOL.rank, floor: float = 0.0) -> list[np.ndarray]:
    """Orthonormal basis of ker(M) for a positive semidefinite M."""
    m = hermitian(m)
    w, vecs = np.linalg.eigh(m)
    thr = rank_threshold(m, tau, floor)
    if w.size and w[0] < -max(thr, 0.0) and w[0] < 0:
        raise NotPSD(f"minimum eigenvalue {w[0]:.3g} below -{thr:.3g}")
    if thr == 0.0:
        sel = w == 0.0
    else:
        sel = w <= thr
    k = vecs[:, sel]
    return canonical_basis(k @ k.conj().T)


def image_basis(m, tau: float = DEFAULT_TOL.rank, floor: float = 0.0) -> list[np.ndarray]:
    m = hermitian(m)
    w, vecs = np.linalg.eigh(m)
    thr = rank_threshold(m, tau, floor)
    k = vecs[:, np.abs(w) > thr]
    return canonical_basis(k @ k.conj().T)


def projector(vectors) -> np.ndarray:
    vectors = list(vectors)
    if not vectors:
        return np.zeros((0, 0), dtype=complex)
    k = np.column_stack(vectors)
    return k @ k.conj().T


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left: np.ndarray  # columns |e_r>
    right: np.ndarray  # columns |f_r>

    def reconstruct(self) -> np.ndarray:
        c = (self.left * self.coefficients) @ self.right.T
        return c.reshape(-1)


def _two_spin_vector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape != (4,):
        raise DimensionMismatch(f"expected a two-spin vector of length 4, got {psi.shape}")
    return psi


def schmidt_decompose(psi) -> SchmidtDecomposition:
    psi = _two_spin_vector(psi)
    u, s, vh = np.linalg.svd(psi.reshape(2, 2))
    return SchmidtDecomposition(s, u, vh.T)


def schmidt_coefficients(psi) -> np.ndarray:
    return np.linalg.svd(_two_spin_vector(psi).reshape(2, 2), compute_uv=False)


def is_product_state(psi, tau: float = DEFAULT_TOL.product) -> bool:
    psi = _two_spin_vector(psi)
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise ValueError("zero vector")
    return bool(schmidt_coefficients(psi / nrm)[1] <= tau)


def swap_factors(m: np.ndarray) -> np.ndarray:
    """Reorder a 4x4 operator from a (x) b to b (x) a."""
    return m.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4)


def realign(eta: np.ndarray) -> np.ndarray:
    """R[(i,k),(j,l)] = eta[(i,j),(k,l)], so A (x) B maps to vec(A) vec(B)^T."""
    return eta.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)


def is_product_operator(eta, tau: float = DEFAULT_TOL.rank, with_factors: bool = False):
    """Decide whether a Hermitian two-spin operator factorizes as A (x) B.

    Uses the operator-Schmidt rank (realignment). With ``with_factors`` a
    pair ``(verdict, (A, B))`` is returned; the factors are Hermitian and,
    for positive semidefinite input, positive semidefinite.
    """
    eta = hermitian(eta, dim=4)
    u, s, vh = np.linalg.svd(realign(eta))
    verdict = bool(s[0] > 0 and s[1] <= tau * s[0])
    if not with_factors:
        return verdict
    if not verdict:
        return False, None
    a = np.sqrt(s[0]) * u[:, 0].reshape(2, 2)
    b = np.sqrt(s[0]) * vh[0, :].reshape(2, 2)
    # A = e^{i t} H with H Hermitian: sum_ij A_ij A_ji = e^{2it} ||H||^2
    z = np.sum(a * a.T)
    phase = np.sqrt(z / abs(z))
    a, b = a / phase, b * phase
    a, b = (a + a.conj().T) / 2, (b + b.conj().T) / 2
    if np.trace(a).real < 0 or (abs(np.trace(a)) < 1e-12 and np.trace(b).real < 0):
        a, b = -a, -b
    return True, (a, b)


def partial_contraction(psi, phi) -> np.ndarray:
    """Matrix of (<psi|_{xy} (x) 1_z)(1_x (x) |phi>_{yz}) as a map from x to z."""
    psi = _two_spin_vector(psi).reshape(2, 2)
    phi = _two_spin_vector(phi).reshape(2, 2)
    return (psi.conj() @ phi).T


def random_state(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_psd(rng: np.random.Generator, dim: int, rank: int) -> np.ndarray:
    c = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    return c @ c.conj().T


def _det_form(mats) -> np.ndarray:
    """Complex symmetric Q with det(sum_i z_i C_i) = z^T Q z."""
    k = len(mats)
    q = np.zeros((k, k), dtype=complex)
    for i in range(k):
        q[i, i] = np.linalg.det(mats[i])
        for j in range(i + 1, k):
            q[i, j] = q[j, i] = (np.linalg.det(mats[i] + mats[j]) - q[i, i] - np.linalg.det(mats[j])) / 2
    return q


def most_entangled_in_span(basis) -> tuple[np.ndarray, float]:
    """Unit vector of span(basis) (orthonormal) maximizing mu_1 * mu_2 = |det C|.

    |z^T Q z| is maximized over unit z by the top eigenvector of the real
    embedding [[Re Q, -Im Q], [-Im Q, -Re Q]]; ties are broken toward the
    first real coordinate so symmetric cases give real witnesses.
    """
    basis = [np.asarray(b, dtype=complex) for b in basis]
    k = len(basis)
    if k == 1:
        v = fix_phase(basis[0])
        s = schmidt_coefficients(v)
        return v, float(s[0] * s[1])
    q = _det_form([b.reshape(2, 2) for b in basis])
    a, bq = q.real, q.imag
    m = np.block([[a, -bq], [-bq, -a]])
    w, vecs = np.linalg.eigh(m)
    top = vecs[:, np.abs(w - w[-1]) <= 1e-10 * max(abs(w[-1]), 1.0)]
    e1 = np.zeros(2 * k)
    e1[0] = 1.0
    x = top @ (top.T @ e1)
    if np.linalg.norm(x) < 1e-8:
        x = top[:, 0]
    x = x / np.linalg.norm(x)
    z = x[:k] + 1j * x[k:]
    v = np.column_stack(basis) @ z
    v = fix_phase(v / np.linalg.norm(v))
    s = schmidt_coefficients(v)
    return v, float(s[0] * s[1])


def most_entangled_in_plane(v0: np.ndarray, v1: np.ndarray) -> tuple[np.ndarray, float]:
    return most_entangled_in_span([v0, v1])


def orthogonal_in_plane(v0: np.ndarray, v1: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Unit vector of span{v0, v1} orthogonal to ``target`` (which lies in the span)."""
    for cand in (v0, v1):
        w = cand - target * np.vdot(target, cand)
        if np.linalg.norm(w) > 1e-6:
            return fix_phase(w / np.linalg.norm(w))
    raise ValueError("degenerate plane")
