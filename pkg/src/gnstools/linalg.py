"""Dense linear-algebra helpers used throughout the package.

Everything here is plain numpy; operators are ordinary 2-d complex arrays
and operator subspaces are row-stacked flattened matrices.
"""

from __future__ import annotations

import numpy as np

# Relative singular-value cutoff for every rank / null-space decision.
RANK_RTOL = 1e-8
# Eigenvalues below this are treated as exact zeros in entropies.
SPECTRUM_CUTOFF = 1e-12


def crandn(rng: np.random.Generator, *shape: int) -> np.ndarray:
    """Standard complex normal samples, unit variance per complex entry."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed n x n unitary: QR of a Gaussian matrix with phase fix."""
    q, r = np.linalg.qr(crandn(rng, n, n))
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def nullspace(a: np.ndarray, rtol: float = RANK_RTOL, atol: float = 0.0) -> np.ndarray:
    """Orthonormal basis (columns) of the right null space of ``a``.

    ``atol`` guards the rank decision when the matrix itself is numerically
    zero, where a purely relative cutoff would count roundoff as rank.
    """
    # The economy SVD already carries all of V when the matrix is tall.
    full = a.shape[0] < a.shape[1]
    _, s, vh = np.linalg.svd(a, full_matrices=full)
    cutoff = atol if s.size == 0 else max(rtol * float(s[0]), atol)
    rank = 0 if s.size == 0 else int(np.sum(s > cutoff))
    return vh[rank:].conj().T


def orthonormal_rows(b: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal rows spanning the row space of ``b`` (dependencies dropped)."""
    _, s, vh = np.linalg.svd(b, full_matrices=False)
    if s.size == 0:
        return vh[:0]
    rank = int(np.sum(s > rtol * s[0]))
    return vh[:rank]


def _ensure_orthonormal_rows(b: np.ndarray, rtol: float) -> np.ndarray:
    if b.shape[0] == 0:
        return b
    gram = b @ b.conj().T
    if np.abs(gram - np.eye(b.shape[0])).max() <= 1e-10:
        return b
    return orthonormal_rows(b, rtol)


def _largest_residual_angle(q1: np.ndarray, q2: np.ndarray) -> float:
    """sin of the largest principal angle, through the residual Gram matrix.

    The residual of q1 against span(q2) has entries of the size of the sines
    themselves, so the eigenvalues of its small Gram matrix carry no
    cancellation and tiny angles stay accurate.
    """
    resid = q1 - (q1 @ q2.conj().T) @ q2
    gram = resid @ resid.conj().T
    lam = np.linalg.eigvalsh(0.5 * (gram + gram.conj().T))
    return float(np.sqrt(max(float(lam.max()), 0.0)))


def subspace_distance(b1: np.ndarray, b2: np.ndarray, rtol: float = RANK_RTOL) -> float:
    """Spectral-norm distance between orthogonal projectors onto two row spans.

    Equals the sine of the largest principal angle for spans of equal
    dimension and exactly 1 when the dimensions differ.
    """
    q1 = _ensure_orthonormal_rows(np.asarray(b1), rtol)
    q2 = _ensure_orthonormal_rows(np.asarray(b2), rtol)
    if q1.shape[0] != q2.shape[0]:
        return 1.0
    if q1.shape[0] == 0:
        return 0.0
    return max(_largest_residual_angle(q1, q2), _largest_residual_angle(q2, q1))


def span_residuals(q_rows: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Euclidean distance of each row of ``vectors`` to span(rows of q_rows).

    ``q_rows`` must already be orthonormal.
    """
    coeff = vectors @ q_rows.conj().T
    return np.linalg.norm(vectors - coeff @ q_rows, axis=1)


def func_hermitian(x: np.ndarray, f) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    w, v = np.linalg.eigh(x)
    return (v * f(w)) @ v.conj().T


def shannon_entropy(p, cutoff: float = SPECTRUM_CUTOFF) -> float:
    """Entropy -sum p log p in nats, with values below ``cutoff`` dropped."""
    p = np.asarray(p, dtype=float).ravel()
    q = p[p > cutoff]
    return float(-np.sum(q * np.log(q)))


def hermitian_part(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + x.conj().T)
