"""Closed-form bipartite model for a single full matrix block.

For A = M_n the GNS space is isomorphic to C^n tensor C^n by sending the
normalized unit with slot (i, j) to |i> tensor |j>. Every construction then
has an explicit tensor form, which makes this module an independent oracle
for the general-path code on single-block algebras.
"""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraElement
from .channels import gauge_measured_state, restrict_to_commutant
from .errors import ShapeMismatchError
from .gns import GnsRep, represent
from .linalg import crandn, subspace_distance
from .modular import ModularData

ORACLE_TOL = 1e-9


class OracleMismatch(AssertionError):
    """A general-path result disagrees with its closed bipartite form."""


class BipartiteModel:
    """Spectrum and coordinate isomorphism for a single-block algebra."""

    def __init__(self, n: int, lambdas, phi: np.ndarray):
        self.n = int(n)
        self.lambdas = np.asarray(lambdas, dtype=float)
        if self.lambdas.shape != (self.n,):
            raise ShapeMismatchError("need one eigenvalue per dimension")
        if np.any(self.lambdas <= 0) or abs(self.lambdas.sum() - 1.0) > 1e-10:
            raise ValueError("spectrum must be positive and sum to 1")
        # phi[product_index] = gns_basis_index
        self.phi = np.asarray(phi, dtype=int)

    @classmethod
    def from_rep(cls, rep: GnsRep) -> "BipartiteModel":
        if rep.shape.num_blocks != 1:
            raise ShapeMismatchError("bipartite model needs a single block")
        n = rep.shape.blocks[0]
        phi = np.array([rep.basis_index(0, i, j) for i in range(n) for j in range(n)])
        return cls(n, rep.lambdas[0], phi)

    def transport(self, mat: np.ndarray) -> np.ndarray:
        """Conjugate a GNS-coordinate matrix into product coordinates."""
        return mat[np.ix_(self.phi, self.phi)]

    def in_eigenbasis(self, rep: GnsRep, a: AlgebraElement) -> np.ndarray:
        v = rep.state.eigenvectors[0]
        return v.conj().T @ a.blocks[0] @ v

    # closed forms -------------------------------------------------------

    def represented(self, a_tilde: np.ndarray) -> np.ndarray:
        return np.kron(a_tilde, np.eye(self.n))

    def conjugated(self, a_tilde: np.ndarray) -> np.ndarray:
        return np.kron(np.eye(self.n), np.conj(a_tilde))

    def swap(self) -> np.ndarray:
        n = self.n
        s = np.zeros((n * n, n * n))
        for i in range(n):
            for j in range(n):
                s[i * n + j, j * n + i] = 1.0
        return s

    def modular_spectrum(self) -> np.ndarray:
        lam = self.lambdas
        return np.array([lam[i] / lam[j] for i in range(self.n) for j in range(self.n)])

    def weights(self, g_tilde: np.ndarray) -> np.ndarray:
        return self.lambdas @ (np.abs(g_tilde) ** 2)

    def measured_marginal(self, g_tilde: np.ndarray) -> np.ndarray:
        lam_g = self.weights(g_tilde)
        gbar = np.conj(g_tilde)
        return (gbar * lam_g) @ gbar.conj().T

    def commutant_span(self) -> np.ndarray:
        n = self.n
        rows = []
        for i in range(n):
            for j in range(n):
                e = np.zeros((n, n))
                e[i, j] = 1.0
                rows.append(np.kron(np.eye(n), e).reshape(-1) / np.sqrt(n))
        return np.stack(rows)


def oracle_suite(
    model: BipartiteModel,
    rep: GnsRep,
    md: ModularData,
    gauges=(),
    samples: int = 4,
    seed: int = 0,
    check: bool = True,
    tol: float = ORACLE_TOL,
) -> dict[str, float]:
    """Compare every general-path object against its closed bipartite form.

    Returns the residual per named check; with ``check`` set, the first
    residual above tolerance raises OracleMismatch naming the check.
    """
    n = model.n
    rng = np.random.default_rng(seed)
    shape = rep.shape
    residuals: dict[str, float] = {}

    def record(name: str, value: float) -> None:
        residuals[name] = max(residuals.get(name, 0.0), float(value))
        if check and residuals[name] > tol:
            raise OracleMismatch(f"{name}: residual {residuals[name]:.3e} exceeds {tol:.0e}")

    elements = [AlgebraElement(shape, [crandn(rng, n, n)]) for _ in range(samples)]
    for a in elements:
        at = model.in_eigenbasis(rep, a)
        pa = model.transport(represent(rep, a))
        record("represented_tensor_form", np.abs(pa - model.represented(at)).max())
        record(
            "conjugated_tensor_form",
            np.abs(model.transport(md.j.sandwich(represent(rep, a))) - model.conjugated(at)).max(),
        )
    for a, b in zip(elements, elements[1:]):
        lhs = model.transport(represent(rep, a @ b))
        rhs = model.transport(represent(rep, a)) @ model.transport(represent(rep, b))
        record("transport_homomorphism", np.abs(lhs - rhs).max())

    record("conjugation_swap", np.abs(model.transport(md.j.mat) - model.swap()).max())
    delta_t = model.transport(md.delta)
    record("modular_diagonal", np.abs(delta_t - np.diag(model.modular_spectrum())).max())

    # The unmixed measurement reproduces the spectrum of R, up to zeros.
    rho_id, _ = gauge_measured_state(rep, md, AlgebraElement.identity(shape))
    expected = np.zeros(n * n)
    expected[:n] = np.sort(model.lambdas)[::-1]
    record(
        "baseline_spectrum",
        np.abs(np.sort(np.linalg.eigvalsh(rho_id))[::-1] - expected).max(),
    )

    for g in gauges:
        gt = model.in_eigenbasis(rep, g)
        rho, report = gauge_measured_state(rep, md, g)
        lam_closed = model.weights(gt)
        record(
            "measurement_weights",
            np.abs(np.sort(report.flat_lambdas()) - np.sort(lam_closed)).max(),
        )
        eig = np.sort(np.linalg.eigvalsh(rho))[::-1]
        full = np.zeros(n * n)
        full[:n] = np.sort(lam_closed)[::-1]
        record("measured_spectrum", np.abs(eig - full).max())
        sigma = model.transport(restrict_to_commutant(rep, md, g))
        closed = np.kron(np.eye(n), model.measured_marginal(gt))
        record("measured_marginal", np.abs(sigma - closed).max())

    basis = md.commutant_basis
    record(
        "commutant_span",
        subspace_distance(
            np.stack([model.transport(b).reshape(-1) for b in basis]),
            model.commutant_span(),
        ),
    )
    return residuals
