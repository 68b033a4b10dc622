"""Operations on whole sets of histories.

Coarse graining and sum rules, conditional probabilities, conservation laws,
records, entropy, ensembles of identical subsystems, and chaining of
probabilities through intermediate (possibly virtual) alternatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import kernels
from .hilbert import (
    ClassOperator,
    Hamiltonian,
    HilbertError,
    HistorySet,
    Projector,
    ProjectiveDecomposition,
    StateVector,
    Tolerances,
    Verdict,
    branch_state,
    candidate_probability,
    chain_class_operator,
    classify_set,
    expectation,
    heisenberg_projector,
)

CONDITIONING_FLOOR = 1e-12
NEGATIVE_THRESHOLD = -1e-15


class ConditioningError(ZeroDivisionError):
    """Conditioning on a candidate probability too close to zero."""


@dataclass(frozen=True)
class Partition:
    blocks: tuple
    block_labels: tuple = ()

    def __post_init__(self):
        blocks = tuple(tuple(int(i) for i in b) for b in self.blocks)
        if not blocks or any(not b for b in blocks):
            raise HilbertError("partition blocks must be non-empty")
        flat = [i for b in blocks for i in b]
        if len(flat) != len(set(flat)):
            raise HilbertError("partition blocks overlap")
        if sorted(flat) != list(range(len(flat))):
            raise HilbertError("partition blocks must cover 0..n-1 exactly")
        labels = tuple(self.block_labels) if self.block_labels else tuple(str(k) for k in range(len(blocks)))
        if len(labels) != len(blocks):
            raise HilbertError("one label per block required")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "block_labels", labels)

    @property
    def size(self) -> int:
        return sum(len(b) for b in self.blocks)

    @classmethod
    def singletons(cls, n) -> "Partition":
        return cls(tuple((i,) for i in range(n)))

    @classmethod
    def whole(cls, n) -> "Partition":
        return cls((tuple(range(n)),), ("all",))

    @classmethod
    def from_assignment(cls, assignment) -> "Partition":
        """Blocks from a per-member block id, ordered by first appearance."""
        order, groups = [], {}
        for i, key in enumerate(assignment):
            if key not in groups:
                groups[key] = []
                order.append(key)
            groups[key].append(i)
        return cls(tuple(tuple(groups[k]) for k in order), tuple(str(k) for k in order))


def coarse_grain(s: HistorySet, part: Partition) -> HistorySet:
    if part.size != len(s):
        raise HilbertError(f"partition covers {part.size} members, set has {len(s)}")
    members = []
    for block in part.blocks:
        op = s.members[block[0]]
        for i in block[1:]:
            op = op + s.members[i]
        members.append(op)
    return HistorySet(tuple(members), part.block_labels)


@dataclass(frozen=True)
class SumRuleReport:
    residuals: tuple
    max_residual: float
    passed: bool
    tolerance: float


def verify_sum_rules(psi: StateVector, s: HistorySet, part: Partition, tol: float = 1e-10) -> SumRuleReport:
    fine = [candidate_probability(psi, c) for c in s.members]
    coarse = coarse_grain(s, part)
    res = tuple(
        abs(candidate_probability(psi, c) - math.fsum(fine[i] for i in block))
        for c, block in zip(coarse.members, part.blocks)
    )
    worst = max(res)
    return SumRuleReport(res, worst, worst < tol, tol)


def conditional_probability(psi: StateVector, c_joint: ClassOperator, c_cond: ClassOperator,
                            floor: float = CONDITIONING_FLOOR) -> float:
    """p(joint) / p(cond).  The result need not lie in [0, 1] for non-LP sets."""
    denom = candidate_probability(psi, c_cond)
    if abs(denom) <= floor:
        raise ConditioningError(f"conditioning probability {denom!r} is within {floor} of zero")
    return candidate_probability(psi, c_joint) / denom


@dataclass(frozen=True, eq=False)
class ConservationReport:
    probabilities: np.ndarray  # [j_final, beta, j_initial]
    initial: np.ndarray  # p(j) = <Psi|P_j(t)|Psi>
    sum_residual: float
    cross_terms_max: float
    lp: bool
    cross_terms_vanish: bool | None  # None when the set is not LP

    @property
    def passed(self) -> bool:
        return self.sum_residual < 1e-10 and self.cross_terms_vanish is not False


def check_conservation(psi: StateVector, h: Hamiltonian, a_decomp: ProjectiveDecomposition,
                       intermediate, t: float, t_final: float, tol: float = 1e-10,
                       tolerances: Tolerances | None = None) -> ConservationReport:
    """Histories P^A_{j'}(t') C_beta P^A_j(t) for a quantity A conserved by H.

    ``intermediate`` is a list of ``(decomposition, time)`` pairs strictly
    between ``t`` and ``t_final``.  The summed identity over beta always
    holds; the vanishing of each cross term is only checked when the full
    set is linearly positive.
    """
    for p in a_decomp.projectors:
        comm = p.matrix @ h.matrix - h.matrix @ p.matrix
        if np.max(np.abs(comm)) > tol:
            raise HilbertError("conserved-quantity projectors do not commute with H")
    times = [t] + [ti for _, ti in intermediate] + [t_final]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise HilbertError("intermediate times must lie strictly between t and t_final")

    n_a = len(a_decomp)
    sizes = [len(d) for d, _ in intermediate]
    betas = list(np.ndindex(*sizes)) if sizes else [()]
    probs = np.zeros((n_a, len(betas), n_a))
    members = []
    for j in range(n_a):
        for b, beta in enumerate(betas):
            for jf in range(n_a):
                steps = [(a_decomp, j, t)]
                steps += [(d, k, ti) for (d, ti), k in zip(intermediate, beta)]
                steps.append((a_decomp, jf, t_final))
                c = chain_class_operator(steps, h)
                members.append(c)
                probs[jf, b, j] = candidate_probability(psi, c)
    initial = np.array([
        candidate_probability(psi, ClassOperator(heisenberg_projector(p, h, t).matrix)) for p in a_decomp.projectors
    ])
    summed = probs.sum(axis=1)
    sum_res = float(np.max(np.abs(summed - np.diag(initial))))
    cross = probs.copy()
    for j in range(n_a):
        cross[j, :, j] = 0.0
    cross_max = float(np.max(np.abs(cross)))
    verdict = classify_set(psi, HistorySet(tuple(members)), tolerances).verdict
    lp = verdict != Verdict.EP_ONLY
    vanish = (cross_max < tol) if lp else None
    return ConservationReport(probs, initial, sum_res, cross_max, lp, vanish)


@dataclass(frozen=True, eq=False)
class RecordSet:
    decomposition: ProjectiveDecomposition

    @property
    def projectors(self):
        return self.decomposition.projectors

    def __len__(self):
        return len(self.decomposition)


def records_from_branches(psi: StateVector, s: HistorySet, threshold: float = 1e-12) -> RecordSet:
    """Records R_a = |branch_a><branch_a| (normalized), completed to the identity.

    A branch with norm at most ``threshold`` has no record of its own and gets a
    zero projector.  The projector onto the orthogonal complement of all
    branches is assigned to the first such empty slot, or, if every branch is
    nonzero, added to the last record.
    """
    d = s.dim
    vecs = [branch_state(psi, c) for c in s.members]
    gram = np.array(vecs).conj() @ np.array(vecs).T
    overlap = float(np.max(np.abs(gram - np.diag(np.diag(gram))))) if len(vecs) > 1 else 0.0
    if overlap > threshold:
        raise HilbertError(f"branches are not mutually orthogonal (overlap {overlap:.3e}); no records exist")
    mats, empty = [], []
    for k, v in enumerate(vecs):
        n = np.linalg.norm(v)
        if n > threshold:
            u = v / n
            mats.append(np.outer(u, u.conj()))
        else:
            mats.append(np.zeros((d, d), dtype=complex))
            empty.append(k)
    rest = np.eye(d) - sum(mats)
    slot = empty[0] if empty else len(mats) - 1
    mats[slot] = mats[slot] + rest
    projs = tuple(Projector(0.5 * (m + m.conj().T)) for m in mats)
    return RecordSet(ProjectiveDecomposition(projs, s.labels))


@dataclass(frozen=True, eq=False)
class RecordReport:
    residuals: np.ndarray  # [beta, alpha]
    max_residual: float
    passed: bool
    record_probabilities: np.ndarray | None
    probability_residual: float | None


def verify_records(psi: StateVector, s: HistorySet, r: RecordSet, tol: float = 1e-10) -> RecordReport:
    if len(r) != len(s):
        raise HilbertError(f"{len(r)} records for {len(s)} histories")
    branches = [branch_state(psi, c) for c in s.members]
    n = len(s)
    res = np.zeros((n, n))
    for b, rb in enumerate(r.projectors):
        for a, v in enumerate(branches):
            target = v if a == b else 0.0
            res[b, a] = np.linalg.norm(rb.matrix @ v - target)
    worst = float(res.max())
    if worst >= tol:
        return RecordReport(res, worst, False, None, None)
    rec = np.array([np.vdot(psi.amplitudes, rb.matrix @ psi.amplitudes).real for rb in r.projectors])
    cand = np.array([candidate_probability(psi, c) for c in s.members])
    return RecordReport(res, worst, True, rec, float(np.max(np.abs(rec - cand))))


def entropy(psi: StateVector, decomp: ProjectiveDecomposition) -> float:
    """-sum p log p + sum p log Tr P, in nats, with 0 log 0 = 0."""
    total = 0.0
    for p in decomp.projectors:
        v = p.matrix @ psi.amplitudes
        w = float(np.vdot(v, v).real)
        if w > 0:
            total += -w * math.log(w) + w * math.log(p.rank)
    return total


@dataclass(frozen=True)
class EnsembleSpec:
    """z = <Psi|C_1|Psi> = amplitude * exp(i phase) for each of N copies."""

    amplitude: float
    phase: float
    n_total: int
    n_c: int = 0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")
        if self.n_total < 0 or not 0 <= self.n_c <= self.n_total:
            raise ValueError("need 0 <= n_c <= n_total")

    @classmethod
    def from_z(cls, z: complex, n_total: int, n_c: int = 0) -> "EnsembleSpec":
        return cls(abs(z), math.atan2(z.imag, z.real), n_total, n_c)

    @property
    def z(self) -> complex:
        return self.amplitude * complex(math.cos(self.phase), math.sin(self.phase))


def ensemble_row(amplitude: float, phase: float, n_total: int) -> np.ndarray:
    """Candidate probabilities Re[z^n (1-z)^(N-n)] for n = 0..N."""
    return np.asarray(kernels.ensemble_row(float(amplitude), float(phase), int(n_total)))


def ensemble_candidate_probability(spec: EnsembleSpec) -> float:
    return float(ensemble_row(spec.amplitude, spec.phase, spec.n_total)[spec.n_c])


@dataclass(frozen=True)
class HorizonWitness:
    n_total: int
    n_c: int
    value: float


def ensemble_positivity_horizon(z: complex, n_max: int, threshold: float = NEGATIVE_THRESHOLD):
    """Smallest N <= n_max with a candidate probability below ``threshold``, or None."""
    z = complex(z)
    if abs(z) > 1 + 1e-15:
        raise ValueError("|z| must not exceed 1")
    hit = kernels.ensemble_horizon(abs(z), math.atan2(z.imag, z.real), int(n_max), float(threshold))
    return None if hit is None else HorizonWitness(*hit)


@dataclass(frozen=True)
class ProductProbabilities:
    lp_joint: float
    lp_product_of_marginals: float
    md_joint: float


def product_history_probability(factors) -> ProductProbabilities:
    """Joint probabilities for independent subsystems without forming tensor products.

    ``factors`` is a list of ``(state, class_operator)`` pairs, one per subsystem.
    """
    if not factors:
        raise ValueError("need at least one subsystem")
    prod = 1.0 + 0j
    marg = 1.0
    md = 1.0
    for psi, c in factors:
        e = expectation(psi, c)
        prod *= e
        marg *= e.real
        v = branch_state(psi, c)
        md *= float(np.vdot(v, v).real)
    return ProductProbabilities(prod.real, marg, md)


@dataclass(frozen=True)
class ChainedProbability:
    label: str
    direct: float
    chained: float


def chain_future_probability(psi: StateVector, future: HistorySet, past: HistorySet, cond: ClassOperator,
                             floor: float = CONDITIONING_FLOOR) -> list:
    """p(gamma|cond) computed directly and by summing over past alternatives beta.

    Operators are multiplied as future . cond . past.  The chained value is
    sum_beta p(gamma|cond, beta) p(beta|cond); when some p(cond, beta) is
    below ``floor`` that term is taken in the cancelled form
    p(gamma, cond, beta) / p(cond).
    """
    p_cond = candidate_probability(psi, cond)
    if abs(p_cond) <= floor:
        raise ConditioningError(f"conditioning probability {p_cond!r} is within {floor} of zero")
    out = []
    for label, f in zip(future.labels, future.members):
        direct = candidate_probability(psi, ClassOperator(f.matrix @ cond.matrix)) / p_cond
        terms = []
        for b in past.members:
            p_cb = candidate_probability(psi, ClassOperator(cond.matrix @ b.matrix))
            p_fcb = candidate_probability(psi, ClassOperator(f.matrix @ cond.matrix @ b.matrix))
            if abs(p_cb) > floor:
                terms.append((p_fcb / p_cb) * (p_cb / p_cond))
            else:
                terms.append(p_fcb / p_cond)
        out.append(ChainedProbability(label, direct, math.fsum(terms)))
    return out


def prediction_conditional(psi: StateVector, realized, future, h: Hamiltonian, threshold: float = 1e-12) -> float:
    """Probability of ``future`` events given the ``realized`` ones.

    Both are lists of ``(decomposition, index, time)``.  The realized branch is
    normalized and the future chain applied to it; the squared norm is the
    answer, which always lies in [0, 1].
    """
    v = psi.amplitudes
    if realized:
        v = chain_class_operator(realized, h).matrix @ v
    n = np.linalg.norm(v)
    if n <= threshold:
        raise ConditioningError("realized branch has zero norm")
    v = v / n
    if future:
        if realized and future[0][2] <= realized[-1][2]:
            raise HilbertError("future events must come after the realized ones")
        v = chain_class_operator(future, h).matrix @ v
    return float(np.vdot(v, v).real)


__all__ = [
    "ChainedProbability", "ConditioningError", "ConservationReport", "EnsembleSpec", "HorizonWitness",
    "Partition", "ProductProbabilities", "RecordReport", "RecordSet", "SumRuleReport",
    "chain_future_probability", "check_conservation", "coarse_grain", "conditional_probability",
    "ensemble_candidate_probability", "ensemble_positivity_horizon", "ensemble_row", "entropy",
    "prediction_conditional", "product_history_probability", "records_from_branches", "verify_records",
    "verify_sum_rules",
]
