"""Shared oracles and instance generators for the test suite.

Everything here recomputes results along routes independent of the library
paths they check: brute-force null spaces, Gram matrices from the state
functional, and direct conjugations.
"""

import numpy as np

from gnstools import AlgebraShape, FaithfulState, represent
from gnstools.linalg import nullspace


def random_shape(rng, max_blocks=4, max_block=8, max_gns=200):
    while True:
        nb = int(rng.integers(1, max_blocks + 1))
        blocks = [int(rng.integers(1, max_block + 1)) for _ in range(nb)]
        if sum(n * n for n in blocks) <= max_gns:
            return AlgebraShape(blocks)


def random_instance(rng, **kwargs):
    shape = random_shape(rng, **kwargs)
    return FaithfulState.random(shape, rng)


def bruteforce_commutant(rep):
    """Null space of the commutation constraints against every represented unit.

    Dense and slow; only for small instances.
    """
    d = rep.dim
    eye = np.eye(d)
    rows = []
    for _, u in rep.units.iter_units():
        g = represent(rep, u)
        rows.append(np.kron(g, eye) - np.kron(eye, g.T))
    null = nullspace(np.vstack(rows))
    return np.stack([null[:, k].reshape(d, d) for k in range(null.shape[1])])


def gram_from_state(rep):
    """Gram matrix of the normalized basis computed from the state functional."""
    entries = []
    for (r, i, j), u in rep.units.iter_units():
        entries.append(u * (1.0 / np.sqrt(rep.lambdas[r][j])))
    k = len(entries)
    gram = np.empty((k, k), dtype=complex)
    for a in range(k):
        for b in range(k):
            gram[a, b] = rep.state.expect(entries[a].adjoint() @ entries[b])
    return gram


def fourier_gauge(rep):
    """Unitary whose squared column moduli are uniform in the state eigenbasis."""
    blocks = []
    for r, n in enumerate(rep.shape.blocks):
        v = rep.state.eigenvectors[r]
        grid = np.arange(n)
        f = np.exp(2j * np.pi * np.outer(grid, grid) / n) / np.sqrt(n)
        blocks.append(v @ f @ v.conj().T)
    from gnstools import AlgebraElement

    return AlgebraElement(rep.shape, blocks)
