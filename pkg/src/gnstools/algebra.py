"""Finite-dimensional operator algebras as direct sums of full matrix blocks.

An algebra element is a tuple of complex square matrices, one per block.
States are given by a positive unit-trace density element; faithfulness
means every block eigenvalue stays above a fixed positivity floor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotFaithfulError, ShapeMismatchError
from .linalg import SPECTRUM_CUTOFF, crandn, haar_unitary, shannon_entropy

# Eigenvalue floor below which a state stops counting as faithful.
POSITIVITY_TOL = 1e-10
# Allowed deviation of tr(R) from 1 for a density element.
TRACE_TOL = 1e-12
HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class AlgebraShape:
    """Block sizes (n_1, ..., n_N) of a direct sum of full matrix algebras."""

    blocks: tuple[int, ...]

    def __init__(self, blocks):
        blocks = tuple(int(n) for n in blocks)
        if len(blocks) == 0:
            raise ValueError("shape needs at least one block")
        if any(n < 1 for n in blocks):
            raise ValueError(f"block sizes must be positive, got {blocks}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def algebra_dim(self) -> int:
        """Linear dimension of the algebra, sum of squared block sizes."""
        return sum(n * n for n in self.blocks)

    @property
    def gns_dim(self) -> int:
        """Dimension of the GNS space; numerically equal to algebra_dim."""
        return self.algebra_dim

    def offsets(self) -> tuple[int, ...]:
        """Start of each block's (i, j) index range in the flat basis order."""
        out, pos = [], 0
        for n in self.blocks:
            out.append(pos)
            pos += n * n
        return tuple(out)

    def index(self, r: int, i: int, j: int) -> int:
        """Flat basis index of slot (block r, row i, column j), row-major."""
        n = self.blocks[r]
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"indices ({i}, {j}) out of range for block of size {n}")
        return self.offsets()[r] + i * n + j


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Block-diagonal element: one complex square matrix per block."""

    shape: AlgebraShape
    blocks: tuple[np.ndarray, ...]

    def __init__(self, shape: AlgebraShape, blocks):
        blocks = tuple(np.array(b, dtype=complex) for b in blocks)
        if len(blocks) != shape.num_blocks:
            raise ShapeMismatchError(
                f"expected {shape.num_blocks} blocks, got {len(blocks)}"
            )
        for n, b in zip(shape.blocks, blocks):
            if b.shape != (n, n):
                raise ShapeMismatchError(f"block of size {b.shape} does not match n={n}")
            b.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def identity(cls, shape: AlgebraShape) -> "AlgebraElement":
        return cls(shape, tuple(np.eye(n) for n in shape.blocks))

    @classmethod
    def zeros(cls, shape: AlgebraShape) -> "AlgebraElement":
        return cls(shape, tuple(np.zeros((n, n)) for n in shape.blocks))

    def _check_same_shape(self, other: "AlgebraElement") -> None:
        if self.shape.blocks != other.shape.blocks:
            raise ShapeMismatchError(
                f"shapes {self.shape.blocks} and {other.shape.blocks} differ"
            )

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_same_shape(other)
        return AlgebraElement(self.shape, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_same_shape(other)
        return AlgebraElement(self.shape, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.shape, tuple(-b for b in self.blocks))

    def __mul__(self, scalar) -> "AlgebraElement":
        if isinstance(scalar, AlgebraElement):
            raise TypeError("use @ for the algebra product, * is scalar only")
        return AlgebraElement(self.shape, tuple(scalar * b for b in self.blocks))

    __rmul__ = __mul__

    def __matmul__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_same_shape(other)
        return AlgebraElement(self.shape, tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.shape, tuple(b.conj().T for b in self.blocks))

    def trace(self) -> complex:
        """Algebra trace: the sum of the ordinary matrix traces of the blocks."""
        return complex(sum(np.trace(b) for b in self.blocks))

    def norm(self) -> float:
        """Hilbert-Schmidt norm over all blocks."""
        return float(np.sqrt(sum(np.linalg.norm(b) ** 2 for b in self.blocks)))

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return all(np.abs(b - b.conj().T).max() <= tol for b in self.blocks)

    def unitarity_defect(self) -> float:
        """max_r || b_r b_r^dag - 1 ||, zero for unitaries."""
        return max(
            float(np.abs(b @ b.conj().T - np.eye(n)).max())
            for n, b in zip(self.shape.blocks, self.blocks)
        )


def _sorted_eigh(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian eigendecomposition, eigenvalues descending, phases fixed.

    Each eigenvector is rotated so its first component of magnitude above
    1e-8 becomes real positive, which pins the basis deterministically.
    """
    w, v = np.linalg.eigh(h)
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    for k in range(v.shape[1]):
        col = v[:, k]
        j0 = int(np.argmax(np.abs(col) > 1e-8))
        phase = col[j0] / abs(col[j0])
        v[:, k] = col * np.conj(phase)
    return w, v


class FaithfulState:
    """State omega(a) = tr(R a) for a positive, unit-trace, invertible R.

    Eigendata of every block of R is computed once at construction and reused
    by the GNS machinery; eigenvalues are sorted descending per block.
    """

    def __init__(self, density: AlgebraElement, positivity_tol: float = POSITIVITY_TOL):
        if not density.is_hermitian():
            raise ValueError("density element is not Hermitian")
        tr = density.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density trace {tr} is not 1 within {TRACE_TOL}")
        eigvals, eigvecs = [], []
        for b in density.blocks:
            w, v = _sorted_eigh(b)
            eigvals.append(w)
            eigvecs.append(v)
        lo = min(float(w.min()) for w in eigvals)
        if lo <= positivity_tol:
            raise NotFaithfulError(
                f"state eigenvalue {lo:.3e} at or below positivity floor {positivity_tol:.0e}"
            )
        self.density = density
        self.eigenvalues = tuple(eigvals)
        self.eigenvectors = tuple(eigvecs)

    @property
    def shape(self) -> AlgebraShape:
        return self.density.shape

    def expect(self, a: AlgebraElement) -> complex:
        """omega(a) = tr(R a)."""
        return (self.density @ a).trace()

    def spectrum(self) -> np.ndarray:
        return np.concatenate(self.eigenvalues)

    def entropy(self, cutoff: float = SPECTRUM_CUTOFF) -> float:
        return shannon_entropy(self.spectrum(), cutoff)

    @classmethod
    def from_spectra(cls, shape: AlgebraShape, spectra, eigenbasis=None) -> "FaithfulState":
        """Build R from per-block eigenvalue lists and an optional eigenbasis."""
        spectra = [np.asarray(s, dtype=float) for s in spectra]
        if len(spectra) != shape.num_blocks:
            raise ShapeMismatchError("one spectrum per block required")
        blocks = []
        for r, (n, s) in enumerate(zip(shape.blocks, spectra)):
            if s.shape != (n,):
                raise ShapeMismatchError(f"spectrum of block {r} must have length {n}")
            b = np.diag(s).astype(complex)
            if eigenbasis is not None:
                v = np.asarray(eigenbasis[r], dtype=complex)
                b = v @ b @ v.conj().T
            blocks.append(b)
        return cls(AlgebraElement(shape, blocks))

    @classmethod
    def random(cls, shape: AlgebraShape, rng: np.random.Generator, rotate: bool = True) -> "FaithfulState":
        """Random faithful state: Dirichlet spectrum mixed with the flat one.

        The flat admixture bounds eigenvalues away from zero so faithfulness
        never degenerates on random batteries.
        """
        total = sum(shape.blocks)
        spec = 0.9 * rng.dirichlet(np.ones(total)) + 0.1 / total
        blocks, pos = [], 0
        for n in shape.blocks:
            lam = spec[pos : pos + n]
            pos += n
            b = np.diag(lam).astype(complex)
            if rotate:
                v = haar_unitary(rng, n)
                b = v @ b @ v.conj().T
            blocks.append(b)
        return cls(AlgebraElement(shape, blocks))


class MatrixUnitSystem:
    """Per-block matrix units aligned with a state's eigenbasis.

    unit(r, i, j) is the element V_r E_ij V_r^dag in block r and zero in the
    others; the products, adjoints and resolutions of identity follow from
    the standard unit relations.
    """

    def __init__(self, shape: AlgebraShape, basis_unitary):
        self.shape = shape
        self.basis_unitary = tuple(np.asarray(v, dtype=complex) for v in basis_unitary)
        if len(self.basis_unitary) != shape.num_blocks:
            raise ShapeMismatchError("one basis unitary per block required")

    def unit(self, r: int, i: int, j: int) -> AlgebraElement:
        blocks = [np.zeros((n, n), dtype=complex) for n in self.shape.blocks]
        v = self.basis_unitary[r]
        blocks[r] = np.outer(v[:, i], v[:, j].conj())
        return AlgebraElement(self.shape, blocks)

    def block_identity(self, r: int) -> AlgebraElement:
        blocks = [np.zeros((n, n), dtype=complex) for n in self.shape.blocks]
        blocks[r] = np.eye(self.shape.blocks[r], dtype=complex)
        return AlgebraElement(self.shape, blocks)

    def iter_indices(self):
        for r, n in enumerate(self.shape.blocks):
            for i in range(n):
                for j in range(n):
                    yield (r, i, j)

    def iter_units(self):
        for r, i, j in self.iter_indices():
            yield (r, i, j), self.unit(r, i, j)


def canonical_matrix_units(state: FaithfulState) -> MatrixUnitSystem:
    """Matrix units in the eigenbasis of R, so R = sum_i lambda_i e_ii per block."""
    return MatrixUnitSystem(state.shape, state.eigenvectors)


def random_unitary(shape: AlgebraShape, seed) -> AlgebraElement:
    """Haar-distributed blockwise unitary, deterministic for a fixed seed."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return AlgebraElement(shape, tuple(haar_unitary(rng, n) for n in shape.blocks))


def random_element(shape: AlgebraShape, rng: np.random.Generator) -> AlgebraElement:
    return AlgebraElement(shape, tuple(crandn(rng, n, n) for n in shape.blocks))


def random_hermitian(shape: AlgebraShape, rng: np.random.Generator) -> AlgebraElement:
    blocks = []
    for n in shape.blocks:
        b = crandn(rng, n, n)
        blocks.append(b + b.conj().T)
    return AlgebraElement(shape, blocks)
