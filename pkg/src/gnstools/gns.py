"""GNS space of a faithful state and the left-multiplication representation.

The Hilbert space is the algebra itself with inner product <a|b> = omega(a* b).
Scaling the eigenbasis matrix units by lambda_j^{-1/2} gives a closed-form
orthonormal basis, ordered block by block and row-major inside each block.
"""

from __future__ import annotations

import numpy as np

from .algebra import (
    AlgebraElement,
    AlgebraShape,
    FaithfulState,
    MatrixUnitSystem,
    canonical_matrix_units,
)
from .errors import InvalidDensityError, NumericalError, ShapeMismatchError

# Acceptance gate for density operators fed to restriction.
DENSITY_TOL = 1e-8
RESTRICTION_RESIDUAL_TOL = 1e-9


class GnsRep:
    """Orthonormal-basis coordinates of the GNS space of a faithful state.

    Attributes
    ----------
    state : the defining faithful state
    units : matrix units aligned with the state's eigenbasis
    dim : Hilbert space dimension (sum of squared block sizes)
    omega : coordinates of the cyclic vector |1>
    """

    def __init__(self, state: FaithfulState):
        self.state = state
        self.shape: AlgebraShape = state.shape
        self.units: MatrixUnitSystem = canonical_matrix_units(state)
        self.lambdas = state.eigenvalues
        self._sqrt = tuple(np.sqrt(w) for w in self.lambdas)
        self.dim = self.shape.gns_dim
        self.offsets = self.shape.offsets()

        omega = np.zeros(self.dim, dtype=complex)
        for r, n in enumerate(self.shape.blocks):
            off = self.offsets[r]
            for i in range(n):
                omega[off + i * n + i] = self._sqrt[r][i]
        omega.setflags(write=False)
        self.omega = omega

    def basis_index(self, r: int, i: int, j: int) -> int:
        return self.shape.index(r, i, j)

    def block_slice(self, r: int) -> slice:
        n = self.shape.blocks[r]
        return slice(self.offsets[r], self.offsets[r] + n * n)

    def vec(self, a: AlgebraElement) -> np.ndarray:
        """Coordinates of |a> in the orthonormal basis."""
        if a.shape.blocks != self.shape.blocks:
            raise ShapeMismatchError("element does not live on this algebra")
        out = np.empty(self.dim, dtype=complex)
        for r, n in enumerate(self.shape.blocks):
            v = self.state.eigenvectors[r]
            at = v.conj().T @ a.blocks[r] @ v
            out[self.block_slice(r)] = (at * self._sqrt[r][None, :]).reshape(-1)
        return out

    def element(self, coords: np.ndarray) -> AlgebraElement:
        """Inverse of :meth:`vec`."""
        coords = np.asarray(coords, dtype=complex)
        if coords.shape != (self.dim,):
            raise ShapeMismatchError(f"expected a vector of length {self.dim}")
        blocks = []
        for r, n in enumerate(self.shape.blocks):
            at = coords[self.block_slice(r)].reshape(n, n) / self._sqrt[r][None, :]
            v = self.state.eigenvectors[r]
            blocks.append(v @ at @ v.conj().T)
        return AlgebraElement(self.shape, blocks)

    def inner(self, a: AlgebraElement, b: AlgebraElement) -> complex:
        """<a|b> = omega(a* b), computed directly on the algebra."""
        return self.state.expect(a.adjoint() @ b)

    def block_projectors(self) -> tuple[np.ndarray, ...]:
        """Projectors onto the invariant subspaces, one per block."""
        out = []
        for r in range(self.shape.num_blocks):
            p = np.zeros((self.dim, self.dim), dtype=complex)
            sl = self.block_slice(r)
            p[sl, sl] = np.eye(sl.stop - sl.start)
            out.append(p)
        return tuple(out)


def build_gns(state: FaithfulState) -> GnsRep:
    """GNS data for a faithful state; raises NotFaithfulError upstream otherwise."""
    return GnsRep(state)


def represent(rep: GnsRep, a: AlgebraElement) -> np.ndarray:
    """Matrix of left multiplication by ``a`` in the orthonormal basis.

    Blockwise this is (a in the eigenbasis) tensor identity, which makes the
    map a unital *-homomorphism by construction.
    """
    if a.shape.blocks != rep.shape.blocks:
        raise ShapeMismatchError("element does not live on this algebra")
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for r, n in enumerate(rep.shape.blocks):
        v = rep.state.eigenvectors[r]
        at = v.conj().T @ a.blocks[r] @ v
        sl = rep.block_slice(r)
        out[sl, sl] = np.kron(at, np.eye(n))
    return out


def unrepresent(rep: GnsRep, x: np.ndarray, rtol: float = 1e-9) -> AlgebraElement:
    """Invert :func:`represent`, checking that ``x`` is in its range."""
    blocks = []
    for r, n in enumerate(rep.shape.blocks):
        sl = rep.block_slice(r)
        t = x[sl, sl].reshape(n, n, n, n)
        at = np.einsum("imkm->ik", t) / n
        v = rep.state.eigenvectors[r]
        blocks.append(v @ at @ v.conj().T)
    a = AlgebraElement(rep.shape, blocks)
    scale = max(1.0, float(np.linalg.norm(x)))
    residual = float(np.linalg.norm(represent(rep, a) - x)) / scale
    if residual > rtol:
        raise NumericalError(
            f"operator is not in the represented algebra (residual {residual:.3e})"
        )
    return a


def check_density(rho: np.ndarray, atol: float = DENSITY_TOL) -> None:
    """Raise InvalidDensityError unless rho is Hermitian, positive, unit trace."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidDensityError("density operator must be a square matrix")
    if np.abs(rho - rho.conj().T).max() > atol:
        raise InvalidDensityError("density operator is not Hermitian")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > atol:
        raise InvalidDensityError(f"density trace {tr:.6g} is not 1 within {atol:.0e}")
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if float(w.min()) < -atol:
        raise InvalidDensityError(f"density has negative eigenvalue {w.min():.3e}")


def restrict_to_algebra(rep: GnsRep, rho: np.ndarray) -> AlgebraElement:
    """Density element of the state a -> Tr(rho pi(a)) on the algebra.

    Solves the linear system over the matrix-unit basis by least squares and
    verifies the residual; the system is square and well conditioned because
    the unit pairing under the algebra trace is a permutation.
    """
    check_density(rho)
    shape = rep.shape
    k = shape.algebra_dim
    y = np.empty(k, dtype=complex)
    for (r, i, j), u in rep.units.iter_units():
        y[shape.index(r, i, j)] = np.trace(rho @ represent(rep, u))

    # tr(u_{r,i,j} u_{s,k,l}) = delta_{rs} delta_{jk} delta_{il}
    m = np.zeros((k, k))
    for r, n in enumerate(shape.blocks):
        for i in range(n):
            for j in range(n):
                m[shape.index(r, i, j), shape.index(r, j, i)] = 1.0
    coeff, *_ = np.linalg.lstsq(m, y, rcond=None)
    residual = float(np.linalg.norm(m @ coeff - y))
    if residual > RESTRICTION_RESIDUAL_TOL:
        raise NumericalError(f"restriction system residual {residual:.3e}")

    blocks = []
    for r, n in enumerate(shape.blocks):
        at = coeff[rep.block_slice(r)].reshape(n, n)
        v = rep.state.eigenvectors[r]
        blocks.append(v @ at @ v.conj().T)
    return AlgebraElement(shape, blocks)
