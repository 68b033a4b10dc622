"""Finite-dimensional Hilbert-space engine for history sets.

States, projectors and Hamiltonians are dense complex numpy arrays wrapped in
small immutable dataclasses that check their invariants on construction.
Class operators carry a provenance record describing how they were built.

Inner products are conjugate-linear in the first slot: ``<a|b> = vdot(a, b)``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

ATOL = 1e-12
SUM_ATOL = 1e-10
DEFAULT_MAX_MEMBERS = 10**6


class HilbertError(ValueError):
    """An input violates a dimension, normalization or projector invariant."""


def _as_matrix(m, name="matrix"):
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise HilbertError(f"{name} must be square, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _max_abs(a):
    return float(np.max(np.abs(a))) if a.size else 0.0


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex).ravel()
        if amp.size < 1:
            raise HilbertError("state vector must have dimension >= 1")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > ATOL:
            raise HilbertError(f"state vector norm is {norm!r}, expected 1")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        amp = np.asarray(amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(amp)
        if norm == 0:
            raise HilbertError("cannot normalize the zero vector")
        return cls(amp / norm)

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True, eq=False)
class Projector:
    matrix: np.ndarray
    rank: int = field(init=False)

    def __post_init__(self):
        m = _as_matrix(self.matrix, "projector")
        if _max_abs(m - m.conj().T) > ATOL:
            raise HilbertError("projector is not Hermitian")
        if _max_abs(m @ m - m) > ATOL:
            raise HilbertError("projector is not idempotent")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "rank", int(round(np.trace(m).real)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def complement(self) -> "Projector":
        return Projector(np.eye(self.dim) - self.matrix)


def _orthonormalize(vectors, tol=1e-10):
    """Modified Gram-Schmidt, applied twice for numerical orthogonality."""
    basis = [np.array(v, dtype=complex) for v in vectors]
    for _ in range(2):
        out = []
        for v in basis:
            w = v.copy()
            for q in out:
                w = w - np.vdot(q, w) * q
            n = np.linalg.norm(w)
            if n <= tol * max(1.0, np.linalg.norm(v)):
                raise HilbertError("basis vectors are linearly dependent")
            out.append(w / n)
        basis = out
    return basis


def make_projector(basis_vectors: Sequence[Sequence[complex]], dim: int | None = None) -> Projector:
    """Orthogonal projector onto the span of ``basis_vectors``.

    An empty list gives the zero projector and then needs ``dim``.
    """
    vecs = [np.asarray(v, dtype=complex).ravel() for v in basis_vectors]
    if not vecs:
        if dim is None:
            raise HilbertError("dimension required for the zero projector")
        return Projector(np.zeros((dim, dim), dtype=complex))
    d = vecs[0].size
    if any(v.size != d for v in vecs) or (dim is not None and dim != d):
        raise HilbertError("basis vectors have mismatched dimensions")
    if len(vecs) > d:
        raise HilbertError("more basis vectors than the space dimension")
    q = np.array(_orthonormalize(vecs)).T
    return Projector(q @ q.conj().T)


@dataclass(frozen=True, eq=False)
class ProjectiveDecomposition:
    """Exhaustive set of mutually orthogonal projectors at one time."""

    projectors: tuple
    labels: tuple = ()

    def __post_init__(self):
        projs = tuple(p if isinstance(p, Projector) else Projector(p) for p in self.projectors)
        if not projs:
            raise HilbertError("decomposition needs at least one projector")
        d = projs[0].dim
        if any(p.dim != d for p in projs):
            raise HilbertError("projectors act on different dimensions")
        labels = tuple(self.labels) if self.labels else tuple(str(i) for i in range(len(projs)))
        if len(labels) != len(projs):
            raise HilbertError("one label per projector required")
        total = sum(p.matrix for p in projs)
        if _max_abs(total - np.eye(d)) > ATOL:
            raise HilbertError("projectors do not sum to the identity")
        for (i, a), (j, b) in itertools.combinations(enumerate(projs), 2):
            if _max_abs(a.matrix @ b.matrix) > ATOL:
                raise HilbertError(f"projectors {labels[i]!r} and {labels[j]!r} are not orthogonal")
        object.__setattr__(self, "projectors", projs)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_basis(cls, basis, labels=()) -> "ProjectiveDecomposition":
        """Rank-one decomposition from the columns of a unitary matrix."""
        u = np.asarray(basis, dtype=complex)
        return cls(tuple(make_projector([u[:, i]]) for i in range(u.shape[1])), labels)

    @classmethod
    def binary(cls, projector, labels=("yes", "no")) -> "ProjectiveDecomposition":
        p = projector if isinstance(projector, Projector) else Projector(projector)
        return cls((p, p.complement()), labels)

    @classmethod
    def trivial(cls, dim, label="I") -> "ProjectiveDecomposition":
        return cls((Projector(np.eye(dim)),), (label,))

    @property
    def dim(self) -> int:
        return self.projectors[0].dim

    def __len__(self):
        return len(self.projectors)


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    matrix: np.ndarray

    def __post_init__(self):
        m = _as_matrix(self.matrix, "Hamiltonian")
        if _max_abs(m - m.conj().T) > ATOL:
            raise HilbertError("Hamiltonian is not Hermitian")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def zero(cls, dim) -> "Hamiltonian":
        return cls(np.zeros((dim, dim)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eigensystem(self):
        return np.linalg.eigh(self.matrix)

    @cached_property
    def is_zero(self) -> bool:
        return not np.any(self.matrix)

    def propagator(self, t: float) -> np.ndarray:
        """exp(-i H t)."""
        w, v = self.eigensystem
        return (v * np.exp(-1j * w * t)) @ v.conj().T


def heisenberg_projector(p: Projector, h: Hamiltonian, t: float) -> Projector:
    """exp(iHt) P exp(-iHt), through the cached eigenbasis of H."""
    if p.dim != h.dim:
        raise HilbertError("projector and Hamiltonian dimensions differ")
    if t == 0 or h.is_zero:
        return p
    u = h.propagator(t)
    m = u.conj().T @ p.matrix @ u
    # Symmetrize away the rounding asymmetry before the invariant check.
    return Projector(0.5 * (m + m.conj().T))


@dataclass(frozen=True)
class ChainStep:
    decomposition: int
    alternative: int
    time: float
    label: str = ""


@dataclass(frozen=True, eq=False)
class ClassOperator:
    """Operator for one history.

    ``kind`` is ``"chain"`` (``chain`` lists the steps in time order),
    ``"sum"`` (``parts`` holds the chains that were added) or ``"opaque"``.
    """

    matrix: np.ndarray
    kind: str = "opaque"
    chain: tuple = ()
    parts: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "matrix", _as_matrix(self.matrix, "class operator"))
        if self.kind not in ("chain", "sum", "opaque"):
            raise HilbertError(f"unknown provenance kind {self.kind!r}")
        times = [s.time for s in self.chain]
        if any(b < a for a, b in zip(times, times[1:])):
            raise HilbertError("chain provenance times must be non-decreasing")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def label(self) -> str:
        if self.kind == "chain":
            return "(" + ",".join(s.label for s in reversed(self.chain)) + ")"
        return self.kind

    def __add__(self, other: "ClassOperator") -> "ClassOperator":
        parts = tuple(self.parts if self.kind == "sum" else (self,)) + tuple(
            other.parts if other.kind == "sum" else (other,)
        )
        kind = "opaque" if any(p.kind == "opaque" for p in parts) else "sum"
        return ClassOperator(self.matrix + other.matrix, kind, (), parts if kind == "sum" else ())

    def reversed_chain(self) -> "ClassOperator":
        """The same projectors multiplied in the opposite order (the adjoint for a chain)."""
        if self.kind != "chain":
            raise HilbertError("only chain class operators can be reversed")
        return ClassOperator(self.matrix.conj().T, "opaque")


def chain_class_operator(steps, h: Hamiltonian) -> ClassOperator:
    """Time-ordered product of Heisenberg projectors, latest time leftmost.

    ``steps`` is a sequence of ``(decomposition, alternative_index, time)``.
    """
    if not steps:
        raise HilbertError("a chain needs at least one step")
    times = [float(t) for _, _, t in steps]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise HilbertError("chain times must be strictly increasing")
    d = h.dim
    m = np.eye(d, dtype=complex)
    record = []
    for pos, (dec, idx, t) in enumerate(steps):
        if dec.dim != d:
            raise HilbertError("decomposition and Hamiltonian dimensions differ")
        if not 0 <= idx < len(dec):
            raise HilbertError(f"alternative index {idx} out of range for step {pos}")
        m = heisenberg_projector(dec.projectors[idx], h, t).matrix @ m
        record.append(ChainStep(pos, idx, float(t), dec.labels[idx]))
    return ClassOperator(m, "chain", tuple(record))


@dataclass(frozen=True, eq=False)
class HistorySet:
    members: tuple
    labels: tuple = ()

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise HilbertError("history set is empty")
        d = members[0].dim
        if any(c.dim != d for c in members):
            raise HilbertError("class operators act on different dimensions")
        labels = tuple(self.labels) if self.labels else tuple(c.label for c in members)
        if len(labels) != len(members):
            raise HilbertError("one label per member required")
        total = sum(c.matrix for c in members)
        resid = _max_abs(total - np.eye(d))
        if resid > SUM_ATOL:
            raise HilbertError(f"class operators do not sum to the identity (residual {resid:.3e})")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.members[0].dim

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def full_chain_set(decompositions, h: Hamiltonian, max_members: int = DEFAULT_MAX_MEMBERS) -> HistorySet:
    """Every chain through a sequence of ``(decomposition, time)`` pairs."""
    sizes = [len(dec) for dec, _ in decompositions]
    count = int(np.prod(sizes)) if sizes else 0
    if count > max_members:
        raise HilbertError(f"{count} histories exceeds the cap of {max_members}")
    members = []
    for combo in itertools.product(*(range(n) for n in sizes)):
        steps = [(dec, i, t) for (dec, t), i in zip(decompositions, combo)]
        members.append(chain_class_operator(steps, h))
    return HistorySet(tuple(members))


def _check_dims(psi: StateVector, c: ClassOperator):
    if psi.dim != c.dim:
        raise HilbertError(f"state dimension {psi.dim} does not match operator dimension {c.dim}")


def expectation(psi: StateVector, c: ClassOperator) -> complex:
    """<Psi|C|Psi>."""
    _check_dims(psi, c)
    a = psi.amplitudes
    return complex(np.vdot(a, c.matrix @ a))


def candidate_probability(psi: StateVector, c: ClassOperator) -> float:
    """Re <Psi|C|Psi>."""
    return expectation(psi, c).real


def candidate_probability_hermitian(psi: StateVector, c: ClassOperator) -> float:
    """Same number through the Hermitian part, (1/2)<Psi|(C + C^dagger)|Psi>."""
    _check_dims(psi, c)
    a = psi.amplitudes
    return float(0.5 * np.vdot(a, (c.matrix + c.matrix.conj().T) @ a).real)


def branch_state(psi: StateVector, c: ClassOperator) -> np.ndarray:
    _check_dims(psi, c)
    return c.matrix @ psi.amplitudes


def decoherence_functional(psi: StateVector, ca: ClassOperator, cb: ClassOperator) -> complex:
    """D(a, b) = <Psi|C_a^dagger C_b|Psi>."""
    return complex(np.vdot(branch_state(psi, ca), branch_state(psi, cb)))


def decoherence_matrix(psi: StateVector, s: HistorySet) -> np.ndarray:
    branches = np.array([branch_state(psi, c) for c in s.members])
    return branches.conj() @ branches.T


class Verdict(str, enum.Enum):
    MD = "MD"
    RLP = "RLP"
    LP = "LP"
    EP_ONLY = "EP_ONLY"


@dataclass(frozen=True)
class Tolerances:
    md: float = 1e-8
    rlp: float = 1e-8
    lp: float = 1e-10

    def __post_init__(self):
        if min(self.md, self.rlp, self.lp) < 0:
            raise HilbertError("tolerances must be non-negative")


@dataclass(frozen=True, eq=False)
class Classification:
    verdict: Verdict
    md_residual: float
    rlp_residual: float
    lp_violation: float
    tolerances: Tolerances
    witnesses: dict
    probabilities: np.ndarray
    imaginary_parts: np.ndarray
    decoherence: np.ndarray
    labels: tuple

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "md_residual": self.md_residual,
            "rlp_residual": self.rlp_residual,
            "lp_violation": self.lp_violation,
            "tolerances": {"md": self.tolerances.md, "rlp": self.tolerances.rlp, "lp": self.tolerances.lp},
            "witnesses": self.witnesses,
            "labels": list(self.labels),
            "probabilities": [float(p) for p in self.probabilities],
            "imaginary_parts": [float(v) for v in self.imaginary_parts],
        }


def classify_set(psi: StateVector, s: HistorySet, tol: Tolerances | None = None) -> Classification:
    """Strongest of MD, RLP, LP that the set satisfies, or EP_ONLY.

    Residuals and the worst offending indices are reported for every condition
    whether or not it holds.
    """
    tol = tol or Tolerances()
    if psi.dim != s.dim:
        raise HilbertError("state and history set dimensions differ")
    expect = np.array([expectation(psi, c) for c in s.members])
    probs = expect.real
    imag = expect.imag
    dmat = decoherence_matrix(psi, s)
    total = probs.sum()
    if abs(total - 1.0) > SUM_ATOL:
        raise HilbertError(f"candidate probabilities sum to {total!r}")

    off = np.abs(dmat - np.diag(np.diag(dmat)))
    if len(s) > 1:
        i, j = np.unravel_index(int(np.argmax(off)), off.shape)
        md_res, md_wit = float(off[i, j]), [int(i), int(j)]
    else:
        md_res, md_wit = 0.0, []
    k_im = int(np.argmax(np.abs(imag)))
    k_lp = int(np.argmin(probs))
    rlp_res = float(abs(imag[k_im]))
    lp_min = float(probs[k_lp])

    lp_ok = lp_min >= -tol.lp
    if md_res <= tol.md:
        verdict = Verdict.MD
    elif lp_ok and rlp_res <= tol.rlp:
        verdict = Verdict.RLP
    elif lp_ok:
        verdict = Verdict.LP
    else:
        verdict = Verdict.EP_ONLY
    witnesses = {
        "md": md_wit,
        "rlp": [k_im],
        "lp": [k_lp],
        "negative": [int(k) for k in np.nonzero(probs < -tol.lp)[0]],
    }
    return Classification(verdict, md_res, rlp_res, lp_min, tol, witnesses, probs, imag, dmat, s.labels)


def hermitian_product_eigenvalues(pa: Projector, pb: Projector) -> np.ndarray:
    """Ascending eigenvalues of P_a P_b + P_b P_a."""
    if not isinstance(pa, Projector) or not isinstance(pb, Projector):
        raise HilbertError("inputs must be Projector instances")
    if pa.dim != pb.dim:
        raise HilbertError("projector dimensions differ")
    g = pa.matrix @ pb.matrix
    return np.linalg.eigvalsh(g + g.conj().T)


def commutator_norm(pa: Projector, pb: Projector) -> float:
    c = pa.matrix @ pb.matrix - pb.matrix @ pa.matrix
    return float(np.linalg.norm(c, 2))
