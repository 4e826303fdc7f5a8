"""Tomita operator, modular data and commutant of the represented algebra.

Antilinear operators are stored as a matrix M acting by v -> M conj(v).
Under the adjoint convention <T* x, y> = <T y, x> the adjoint matrix is the
plain transpose, composing two antilinears gives the linear M1 conj(M2),
and T X T (X linear) has matrix M conj(X) conj(M).
"""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraElement, random_unitary
from .gns import GnsRep, represent
from .linalg import (
    RANK_RTOL,
    dagger,
    hermitian_part,
    nullspace,
    orthonormal_rows,
    span_residuals,
    subspace_distance,
)
from .errors import NumericalError


class AntilinearOp:
    """Antilinear operator on coordinate space: v -> mat @ conj(v)."""

    def __init__(self, mat: np.ndarray):
        self.mat = np.asarray(mat, dtype=complex)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.mat @ np.conj(v)

    def adjoint(self) -> "AntilinearOp":
        # <T* x, y> = <T y, x>  <=>  M* = M^T
        return AntilinearOp(self.mat.T)

    def compose(self, other: "AntilinearOp") -> np.ndarray:
        """self after other; two antilinears compose to a linear matrix."""
        return self.mat @ np.conj(other.mat)

    def after_linear(self, x: np.ndarray) -> "AntilinearOp":
        """self after the linear map x."""
        return AntilinearOp(self.mat @ np.conj(x))

    def sandwich(self, x: np.ndarray) -> np.ndarray:
        """T x T for linear x; linear, with matrix M conj(x) conj(M)."""
        return self.mat @ np.conj(x) @ np.conj(self.mat)


def tomita_operator(rep: GnsRep) -> AntilinearOp:
    """The closure of |a> -> |a*| in coordinates, assembled column by column."""
    d = rep.dim
    mat = np.empty((d, d), dtype=complex)
    basis = np.eye(d)
    for k in range(d):
        mat[:, k] = rep.vec(rep.element(basis[k]).adjoint())
    return AntilinearOp(mat)


class ModularData:
    """Polar data of the Tomita operator plus the commutant basis.

    The commutant basis is computed lazily from the representation the data
    was built on; ``j`` is the modular conjugation and ``delta`` the modular
    operator with spectral data cached for the flow.
    """

    def __init__(self, s: AntilinearOp, delta: np.ndarray, j: AntilinearOp,
                 delta_eig: tuple[np.ndarray, np.ndarray], rep: GnsRep | None = None):
        self.s = s
        self.delta = delta
        self.j = j
        self.delta_eigenvalues, self.delta_eigenvectors = delta_eig
        self.rep = rep
        self._commutant = None

    @property
    def commutant_basis(self) -> np.ndarray:
        if self._commutant is None:
            if self.rep is None:
                raise NumericalError("modular data was built without a representation")
            self._commutant = commutant(self.rep)
        return self._commutant

    def delta_power(self, p: complex) -> np.ndarray:
        """Delta^p through the spectral calculus; p may be complex (flow)."""
        w = self.delta_eigenvalues
        v = self.delta_eigenvectors
        return (v * np.exp(p * np.log(w))) @ v.conj().T


def polar_decompose(s: AntilinearOp, rep: GnsRep | None = None) -> ModularData:
    """Split S = J Delta^{1/2} with Delta = S* S positive and J antiunitary."""
    delta = hermitian_part(s.adjoint().compose(s))
    w, v = np.linalg.eigh(delta)
    if float(w.min()) <= 0.0:
        raise NumericalError(f"Tomita operator is singular (min eig {w.min():.3e})")
    inv_sqrt = (v * (w ** -0.5)) @ v.conj().T
    j = s.after_linear(inv_sqrt)
    return ModularData(s, delta, j, (w, v), rep=rep)


def build_modular(rep: GnsRep) -> ModularData:
    return polar_decompose(tomita_operator(rep), rep=rep)


def algebra_image_basis(rep: GnsRep) -> np.ndarray:
    """Hilbert-Schmidt orthonormal basis of the represented algebra, row-stacked.

    The represented units are HS-orthogonal with norm sqrt(n_r), so scaling is
    enough; rows are flattened d x d matrices.
    """
    d = rep.dim
    rows = np.empty((rep.shape.algebra_dim, d * d), dtype=complex)
    for (r, i, j), u in rep.units.iter_units():
        rows[rep.shape.index(r, i, j)] = represent(rep, u).reshape(-1) / np.sqrt(
            rep.shape.blocks[r]
        )
    return rows


def _sector_generators(n: int) -> tuple[np.ndarray, np.ndarray]:
    """A deterministic pair generating the full n x n matrix algebra.

    A diagonal with distinct integer entries separates the rows; the cyclic
    shift connects them. Both are exact integer matrices, so the reductions
    they induce are exact.
    """
    h = np.diag(np.arange(n, dtype=float))
    s = np.zeros((n, n))
    for i in range(n):
        s[i, (i + 1) % n] = 1.0
    return h, s


def commutant(rep: GnsRep, rtol: float = RANK_RTOL) -> np.ndarray:
    """HS-orthonormal basis of the commutant of the represented algebra.

    Commutation with the represented block identities (exact 0/1 diagonals)
    forces a solution to be block diagonal over the invariant subspaces, and
    inside each subspace commutation with the exactly diagonal generator
    restricts it to a group-diagonal form. The remaining shift constraints
    are solved as a numerical null-space problem with the shared rank cutoff.
    """
    d = rep.dim
    ops: list[np.ndarray] = []
    for r, n in enumerate(rep.shape.blocks):
        sl = rep.block_slice(r)
        if n == 1:
            b = np.zeros((d, d), dtype=complex)
            b[sl.start, sl.start] = 1.0
            ops.append(b)
            continue
        _, s = _sector_generators(n)
        # Unknowns: one n x n matrix per diagonal group i; constraints
        # s_ij (B_i - B_j) = 0 for every nonzero entry of the shift.
        pairs = [(i, j) for i in range(n) for j in range(n) if s[i, j] != 0.0]
        nvars = n * n * n
        cmat = np.zeros((len(pairs) * n * n, nvars))
        row = 0
        for (i, j) in pairs:
            for a in range(n):
                for b_ in range(n):
                    cmat[row, (i * n + a) * n + b_] += s[i, j]
                    cmat[row, (j * n + a) * n + b_] -= s[i, j]
                    row += 1
        null = nullspace(cmat, rtol)
        for col in range(null.shape[1]):
            grouped = null[:, col].reshape(n, n, n)
            b = np.zeros((d, d), dtype=complex)
            sector = np.zeros((n * n, n * n), dtype=complex)
            for i in range(n):
                rows_ = slice(i * n, (i + 1) * n)
                sector[rows_, rows_] = grouped[i]
            b[sl, sl] = sector
            ops.append(b)
    return np.stack(ops)


def commutant_dimension(rep: GnsRep) -> int:
    return int(commutant(rep).shape[0])


def modular_flow_residual(md: ModularData, rep: GnsRep, t_values) -> float:
    """Largest distance of Delta^{it} pi(u) Delta^{-it} from span pi(A).

    Checked for every basis unit u and every requested t.
    """
    q = algebra_image_basis(rep)
    worst = 0.0
    pis = np.stack([represent(rep, u) for _, u in rep.units.iter_units()])
    k, d = pis.shape[0], rep.dim
    for t in np.atleast_1d(np.asarray(t_values, dtype=float)):
        u_t = md.delta_power(1j * t)
        left = (u_t @ pis.transpose(1, 0, 2).reshape(d, k * d)).reshape(d, k, d)
        flowed = (left.transpose(1, 0, 2).reshape(k * d, d) @ u_t.conj().T)
        rows = flowed.reshape(k, d * d)
        worst = max(worst, float(span_residuals(q, rows).max()))
    return worst


def joint_commutant(mats, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of {B : [B, M] = 0 for every M}, row-major vec.

    Intended for O(1)-normalized generators (unitaries); the rank decision
    carries an absolute floor at the same level as the relative cutoff so a
    numerically zero commutation map keeps its full null space.
    """
    mats = [np.asarray(m) for m in mats]
    d = mats[0].shape[0]
    eye = np.eye(d)
    blocks = [np.kron(m, eye) - np.kron(eye, m.T) for m in mats]
    null = nullspace(np.vstack(blocks), rtol, atol=rtol)
    return np.stack([null[:, k].reshape(d, d) for k in range(null.shape[1])])


def generating_unitaries(rep: GnsRep) -> list[AlgebraElement]:
    """Two unitaries built from the matrix units that generate the algebra.

    A global phase ladder (all diagonal phases distinct across blocks) plus a
    blockwise cyclic shift; their generated *-algebra is the whole direct sum.
    """
    shape = rep.shape
    total = sum(shape.blocks)
    phases = np.exp(2j * np.pi * np.arange(total) / total)
    ladder_blocks, shift_blocks = [], []
    pos = 0
    for r, n in enumerate(shape.blocks):
        v = rep.state.eigenvectors[r]
        ladder_blocks.append(v @ np.diag(phases[pos : pos + n]) @ v.conj().T)
        pos += n
        perm = np.zeros((n, n), dtype=complex)
        for i in range(n):
            perm[(i + 1) % n, i] = 1.0
        shift_blocks.append(v @ perm @ v.conj().T)
    return [
        AlgebraElement(shape, ladder_blocks),
        AlgebraElement(shape, shift_blocks),
    ]


def lifted_gauge_unitary(rep: GnsRep, md: ModularData, g: AlgebraElement) -> np.ndarray:
    """J pi(g) J, the gauge action on the complementary subsystem."""
    return md.j.sandwich(represent(rep, g))


def gauge_commutant_distance(
    rep: GnsRep,
    md: ModularData,
    sample_count: int = 8,
    seed: int = 0,
    include_generating: bool = True,
    gauges=None,
) -> float:
    """Distance between the joint commutant of lifted gauge unitaries and pi(A).

    Haar samples alone generate the gauge group almost surely; the
    deterministic generating pair is added by default so the check cannot
    fail by unlucky sampling. A distance of 1 signals a non-generating set.
    """
    elements = list(gauges) if gauges is not None else []
    for i in range(sample_count):
        elements.append(random_unitary(rep.shape, np.random.default_rng((seed, i))))
    if include_generating:
        elements.extend(generating_unitaries(rep))
    lifted = [lifted_gauge_unitary(rep, md, g) for g in elements]
    joint = joint_commutant(lifted)
    rows = joint.reshape(joint.shape[0], -1)
    return subspace_distance(rows, algebra_image_basis(rep))
