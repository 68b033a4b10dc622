"""Random model generators shared by the test modules."""

import numpy as np
from scipy.stats import unitary_group

from histoq.hilbert import (
    Hamiltonian,
    Projector,
    ProjectiveDecomposition,
    StateVector,
    full_chain_set,
    make_projector,
)


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector.normalized(v)


def random_hamiltonian(rng, dim, scale=1.0):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return Hamiltonian(scale * 0.5 * (a + a.conj().T))


def random_unitary(rng, dim):
    return unitary_group.rvs(dim, random_state=rng) if dim > 1 else np.eye(1, dtype=complex)


def random_decomposition(rng, dim, n_parts=None):
    """Random exhaustive decomposition into ``n_parts`` blocks of a random basis."""
    u = random_unitary(rng, dim)
    n_parts = n_parts or int(rng.integers(2, dim + 1)) if dim > 1 else 1
    n_parts = min(max(n_parts, 1), dim)
    cuts = np.sort(rng.choice(np.arange(1, dim), size=n_parts - 1, replace=False)) if n_parts > 1 else []
    blocks = np.split(np.arange(dim), cuts)
    projs = tuple(make_projector([u[:, i] for i in b]) for b in blocks)
    return ProjectiveDecomposition(projs)


def random_chain_set(rng, dim, length, zero_h=False):
    h = Hamiltonian.zero(dim) if zero_h else random_hamiltonian(rng, dim)
    times = np.sort(rng.uniform(0, 3, size=length))
    times = times + 1e-3 * np.arange(length)  # keep them strictly increasing
    decs = [(random_decomposition(rng, dim), float(t)) for t in times]
    return full_chain_set(decs, h), h


def random_rank_one(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_projector(rng, dim, rank):
    u = random_unitary(rng, dim)
    return make_projector([u[:, i] for i in range(rank)])


def conservation_model():
    """Dim-4 model with A = H = diag(0, 0, 1, 1) and a real intermediate basis mixing the eigenspaces.

    Returns (psi, h, a_decomp, q_decomp).  An intermediate time of pi/2 turns
    every cross term purely imaginary (LP); generic times give a non-LP set.
    """
    h = Hamiltonian(np.diag([0.0, 0.0, 1.0, 1.0]))
    a = ProjectiveDecomposition(
        (make_projector([(1, 0, 0, 0), (0, 1, 0, 0)]), make_projector([(0, 0, 1, 0), (0, 0, 0, 1)])), ("a0", "a1")
    )
    c, s = np.cos(0.6), np.sin(0.6)
    c2, s2 = np.cos(0.4), np.sin(0.4)
    r = np.array([[c, 0, s, 0], [0, c, 0, s], [-s, 0, c, 0], [0, -s, 0, c]])
    r = r @ np.array([[1, 0, 0, 0], [0, c2, s2, 0], [0, -s2, c2, 0], [0, 0, 0, 1]])
    q = ProjectiveDecomposition((make_projector([r[:, 0], r[:, 1]]), make_projector([r[:, 2], r[:, 3]])), ("q0", "q1"))
    return StateVector.normalized([1, 2, 3, 4]), h, a, q
