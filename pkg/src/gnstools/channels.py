"""Gauge action on the purification, induced quantum operations and entropies.

The unitary group of the algebra acts on the GNS space through the modular
conjugation. Conjugating the diagonal matrix units by a gauge element gives
a projective measurement whose Kraus operators live in the commutant; the
measured cyclic state carries a gauge-dependent entropy, never below the
entropy of the state itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .algebra import AlgebraElement, random_unitary
from .errors import InvalidChannelError, InvalidGaugeError
from .gns import GnsRep, check_density, represent, unrepresent
from .linalg import SPECTRUM_CUTOFF, crandn, shannon_entropy
from .modular import ModularData, lifted_gauge_unitary

UNITARITY_TOL = 1e-9
COMPLETENESS_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class GaugeElement:
    """A blockwise unitary together with its lifted action J pi(g) J."""

    element: AlgebraElement
    lifted: np.ndarray


def lift_gauge(rep: GnsRep, md: ModularData, g: AlgebraElement) -> GaugeElement:
    defect = g.unitarity_defect()
    if defect > UNITARITY_TOL:
        raise InvalidGaugeError(f"gauge element unitarity defect {defect:.3e}")
    return GaugeElement(g, lifted_gauge_unitary(rep, md, g))


@dataclass(frozen=True, eq=False)
class GaugeProjectorFamily:
    """Projectors J pi(g e_kk g*) J indexed by (block, diagonal slot)."""

    gauge: GaugeElement
    projectors: dict[tuple[int, int], np.ndarray]

    def total(self) -> np.ndarray:
        return sum(self.projectors.values())

    def block_sum(self, r: int) -> np.ndarray:
        n = next(iter(self.projectors.values())).shape[0]
        out = np.zeros((n, n), dtype=complex)
        for (rr, _), p in self.projectors.items():
            if rr == r:
                out += p
        return out


def gauge_projectors(rep: GnsRep, md: ModularData, g: AlgebraElement) -> GaugeProjectorFamily:
    """The gauge-twisted measurement family of a unitary g."""
    gauge = lift_gauge(rep, md, g)
    projectors = {}
    for r, n in enumerate(rep.shape.blocks):
        for k in range(n):
            p = g @ rep.units.unit(r, k, k) @ g.adjoint()
            projectors[(r, k)] = md.j.sandwich(represent(rep, p))
    return GaugeProjectorFamily(gauge, projectors)


class KrausChannel:
    """Quantum operation rho -> sum_k L_k rho L_k* with sum_k L_k* L_k = 1."""

    def __init__(self, kraus_ops, completeness_tol: float = COMPLETENESS_TOL):
        ops = [np.asarray(k, dtype=complex) for k in kraus_ops]
        if not ops:
            raise InvalidChannelError("need at least one Kraus operator")
        d = ops[0].shape[0]
        total = sum(k.conj().T @ k for k in ops)
        defect = float(np.abs(total - np.eye(d)).max())
        if defect > completeness_tol:
            raise InvalidChannelError(f"Kraus completeness defect {defect:.3e}")
        self.kraus_ops = ops

    def __len__(self) -> int:
        return len(self.kraus_ops)


def projective_channel(family: GaugeProjectorFamily) -> KrausChannel:
    return KrausChannel(list(family.projectors.values()))


def apply_channel(channel: KrausChannel, rho: np.ndarray) -> np.ndarray:
    """Apply the channel to a density operator."""
    check_density(rho)
    out = np.zeros_like(np.asarray(rho, dtype=complex))
    for k in channel.kraus_ops:
        out += k @ rho @ k.conj().T
    return out


def random_commutant_channel(
    md: ModularData, rng: np.random.Generator, num_ops: int = 3
) -> KrausChannel:
    """Random valid Kraus family inside the commutant.

    Draws random combinations of the commutant basis and right-normalizes by
    T^{-1/2} with T = sum b* b; T stays in the commutant, so the family does.
    """
    basis = md.commutant_basis
    k, d = basis.shape[0], basis.shape[1]
    while True:
        raw = [
            np.tensordot(crandn(rng, k), basis, axes=(0, 0)) for _ in range(num_ops)
        ]
        total = sum(b.conj().T @ b for b in raw)
        w, v = np.linalg.eigh(0.5 * (total + total.conj().T))
        if float(w.min()) > 1e-6 * float(w.max()):
            break
    inv_sqrt = (v * (w ** -0.5)) @ v.conj().T
    return KrausChannel([b @ inv_sqrt for b in raw])


@dataclass(frozen=True, eq=False)
class EntropyReport:
    """Measurement weights and entropies attached to one gauge element."""

    gauge: GaugeElement
    lambdas: tuple[np.ndarray, ...]
    entropy: float
    baseline: float
    gap: float

    def flat_lambdas(self) -> np.ndarray:
        return np.concatenate(self.lambdas)


def measurement_weights(rep: GnsRep, g: AlgebraElement) -> tuple[np.ndarray, ...]:
    """Weights omega(g e_kk g*), blockwise, without building the projectors.

    In the eigenbasis of the state these are the spectrum mixed by the
    doubly stochastic matrix of squared moduli of g's columns.
    """
    out = []
    for r in range(rep.shape.num_blocks):
        v = rep.state.eigenvectors[r]
        gt = v.conj().T @ g.blocks[r] @ v
        out.append(rep.lambdas[r] @ (np.abs(gt) ** 2))
    return tuple(out)


def gauge_measured_state(
    rep: GnsRep, md: ModularData, g: AlgebraElement
) -> tuple[np.ndarray, EntropyReport]:
    """Measured cyclic state and its entropy report.

    The output density is the projective measurement of |Omega><Omega| by the
    gauge family; its nonzero spectrum is the squared norms of the projected
    cyclic vector.
    """
    family = gauge_projectors(rep, md, g)
    omega = rep.omega
    rho = np.zeros((rep.dim, rep.dim), dtype=complex)
    lam_blocks = []
    for r, n in enumerate(rep.shape.blocks):
        lam = np.empty(n)
        for k in range(n):
            w = family.projectors[(r, k)] @ omega
            lam[k] = float(np.real(np.vdot(w, w)))
            rho += np.outer(w, w.conj())
        lam_blocks.append(lam)
    flat = np.concatenate(lam_blocks)
    entropy = shannon_entropy(flat)
    baseline = rep.state.entropy()
    report = EntropyReport(
        gauge=family.gauge,
        lambdas=tuple(lam_blocks),
        entropy=entropy,
        baseline=baseline,
        gap=entropy - baseline,
    )
    return rho, report


def state_mirror(rep: GnsRep, md: ModularData) -> np.ndarray:
    """J pi(R) J, the commutant-side copy of the state's density element."""
    return md.j.sandwich(represent(rep, rep.state.density))


def restrict_to_commutant(rep: GnsRep, md: ModularData, g: AlgebraElement) -> np.ndarray:
    """Density element on the commutant implementing the measured state there.

    Applies the gauge measurement to J pi(R) J; by construction the result
    stays in the commutant and reproduces the measured state on commutant
    observables.
    """
    family = gauge_projectors(rep, md, g)
    mirror = state_mirror(rep, md)
    out = np.zeros_like(mirror)
    for p in family.projectors.values():
        out += p @ mirror @ p
    return out


def commutant_mirror_element(rep: GnsRep, md: ModularData, x: np.ndarray) -> AlgebraElement:
    """The algebra element a with x = J pi(a*) J, for x in the commutant."""
    return unrepresent(rep, md.j.sandwich(x)).adjoint()


def commutant_trace(rep: GnsRep, md: ModularData, x: np.ndarray) -> complex:
    """Algebra trace on the commutant, normalized like the algebra trace."""
    return commutant_mirror_element(rep, md, x).trace()


def commutant_entropy(rep: GnsRep, md: ModularData, x: np.ndarray,
                      cutoff: float = SPECTRUM_CUTOFF) -> float:
    """Entropy of a commutant density element under the commutant trace."""
    a = commutant_mirror_element(rep, md, x)
    spectrum = np.concatenate([np.linalg.eigvalsh(b) for b in a.blocks])
    return shannon_entropy(spectrum, cutoff)


def _blockwise_relative_entropy(x: AlgebraElement, y: AlgebraElement,
                                cutoff: float = SPECTRUM_CUTOFF) -> float:
    """tr x (log x - log y) over the blocks; inf on support mismatch."""
    total = 0.0
    for bx, by in zip(x.blocks, y.blocks):
        wx, vx = np.linalg.eigh(bx)
        wy, vy = np.linalg.eigh(by)
        if np.any(wy <= cutoff):
            null = vy[:, wy <= cutoff]
            weight = float(np.real(np.trace(null.conj().T @ bx @ null)))
            if weight > cutoff:
                return math.inf
        total += float(sum(w * np.log(w) for w in wx if w > cutoff))
        logy = (vy * np.log(np.maximum(wy, cutoff))) @ vy.conj().T
        total -= float(np.real(np.trace(bx @ logy)))
    return total


def commutant_relative_entropy(rep: GnsRep, md: ModularData,
                               x: np.ndarray, y: np.ndarray) -> float:
    """Relative entropy S(x || y) of commutant densities under the commutant trace."""
    ax = commutant_mirror_element(rep, md, x)
    ay = commutant_mirror_element(rep, md, y)
    return _blockwise_relative_entropy(ax, ay)


class EntropyGap(NamedTuple):
    """The measured-minus-baseline entropy, computed along two routes."""

    difference: float
    relative: float


def entropy_gap(rep: GnsRep, md: ModularData, g: AlgebraElement) -> EntropyGap:
    """Entropy gained by the gauge measurement, as a difference and as a
    relative entropy of the unmeasured commutant state from the measured one.

    For a projective measurement E the pinching identity gives
    S(E(tau)) - S(tau) = S(tau || E(tau)), with tau = J pi(R) J here.
    """
    _, report = gauge_measured_state(rep, md, g)
    mirror = state_mirror(rep, md)
    measured = restrict_to_commutant(rep, md, g)
    relative = commutant_relative_entropy(rep, md, mirror, measured)
    return EntropyGap(difference=report.gap, relative=relative)


# ---------------------------------------------------------------------------
# Entropy extremization over the gauge group
# ---------------------------------------------------------------------------


@dataclass
class ExtremizeOptions:
    max_iter: int = 400
    starts: int = 8
    seed: int = 0
    fd_step: float = 1e-5
    grad_tol: float = 1e-7
    init_step: float = 0.5
    min_step: float = 1e-12


@dataclass
class TracePoint:
    start: int
    iteration: int
    entropy: float
    grad_norm: float
    step: float


@dataclass
class ExtremizeResult:
    gauge: AlgebraElement
    entropy: float
    baseline: float
    converged: bool
    trace: list[TracePoint] = field(default_factory=list)


def _hermitian_basis(n: int) -> list[np.ndarray]:
    """Orthonormal basis of n x n Hermitian matrices under tr(A B)."""
    out = []
    for i in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[i, i] = 1.0
        out.append(e)
    inv = 1.0 / np.sqrt(2.0)
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = inv
            e[j, i] = inv
            out.append(e)
            f = np.zeros((n, n), dtype=complex)
            f[i, j] = 1j * inv
            f[j, i] = -1j * inv
            out.append(f)
    return out


def _block_exp_i(h_blocks: list[np.ndarray], scale: float) -> list[np.ndarray]:
    """exp(i * scale * H) per block through the Hermitian spectral calculus."""
    out = []
    for h in h_blocks:
        w, v = np.linalg.eigh(h)
        out.append((v * np.exp(1j * scale * w)) @ v.conj().T)
    return out


def _entropy_objective(rep: GnsRep, g: AlgebraElement) -> float:
    return shannon_entropy(np.concatenate(measurement_weights(rep, g)))


def extremize_entropy(
    rep: GnsRep, md: ModularData, opts: ExtremizeOptions | None = None
) -> ExtremizeResult:
    """Ascend the measured-state entropy over the unitary gauge group.

    Multi-start gradient ascent with central finite differences over an
    orthonormal Hermitian basis, exponential retraction on the right and a
    backtracking line search. For a single full block the supremum is log n,
    reached where every measurement weight is uniform.
    """
    opts = opts or ExtremizeOptions()
    shape = rep.shape
    basis_per_block = [_hermitian_basis(n) for n in shape.blocks]
    directions: list[tuple[int, np.ndarray]] = []
    for r, basis in enumerate(basis_per_block):
        directions.extend((r, h) for h in basis)
    # Retractions for finite-difference probes, cached per direction.
    probes = []
    for r, h in directions:
        w, v = np.linalg.eigh(h)
        plus = (v * np.exp(1j * opts.fd_step * w)) @ v.conj().T
        minus = (v * np.exp(-1j * opts.fd_step * w)) @ v.conj().T
        probes.append((r, plus, minus))

    def shifted(g: AlgebraElement, r: int, factor: np.ndarray) -> AlgebraElement:
        blocks = list(g.blocks)
        blocks[r] = blocks[r] @ factor
        return AlgebraElement(shape, blocks)

    baseline = rep.state.entropy()
    best_g = AlgebraElement.identity(shape)
    best_val = _entropy_objective(rep, best_g)
    converged = False
    trace: list[TracePoint] = []

    for start in range(opts.starts):
        g = random_unitary(shape, np.random.default_rng((opts.seed, start)))
        val = _entropy_objective(rep, g)
        step = opts.init_step
        for iteration in range(opts.max_iter):
            grad = np.empty(len(directions))
            for b, (r, plus, minus) in enumerate(probes):
                up = _entropy_objective(rep, shifted(g, r, plus))
                down = _entropy_objective(rep, shifted(g, r, minus))
                grad[b] = (up - down) / (2.0 * opts.fd_step)
            grad_norm = float(np.linalg.norm(grad))
            trace.append(TracePoint(start, iteration, val, grad_norm, step))
            if grad_norm < opts.grad_tol:
                converged = True
                break
            ascent = [np.zeros((n, n), dtype=complex) for n in shape.blocks]
            for coeff, (r, h) in zip(grad, directions):
                ascent[r] = ascent[r] + coeff * h
            # Backtracking with one expansion attempt per iteration.
            step = min(step * 2.0, 10.0 / max(grad_norm, 1e-30))
            accepted = False
            while step >= opts.min_step:
                factors = _block_exp_i(ascent, step)
                cand = AlgebraElement(shape, [b @ f for b, f in zip(g.blocks, factors)])
                cand_val = _entropy_objective(rep, cand)
                if cand_val > val + 1e-4 * step * grad_norm * grad_norm:
                    g, val = cand, cand_val
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                break
        if val > best_val:
            best_val, best_g = val, g

    return ExtremizeResult(
        gauge=best_g,
        entropy=best_val,
        baseline=baseline,
        converged=converged,
        trace=trace,
    )
