"""Finite-dimensional example models: two-time spin-1/2 histories and three boxes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._kernels import kernels
from .hilbert import (
    ClassOperator,
    Hamiltonian,
    HistorySet,
    Projector,
    ProjectiveDecomposition,
    StateVector,
    chain_class_operator,
    full_chain_set,
    make_projector,
)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

LP_GRID_THRESHOLD = -1e-14
SPIN_LABELS = ("++", "+-", "-+", "--")


@dataclass(frozen=True)
class SpinState:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        if not 0.0 <= self.phi < 2 * math.pi:
            raise ValueError(f"phi={self.phi} outside [0, 2pi)")

    def vector(self) -> StateVector:
        h = 0.5 * self.theta
        return StateVector([
            complex(math.cos(0.5 * self.phi), math.sin(0.5 * self.phi)) * math.cos(h),
            complex(math.cos(0.5 * self.phi), -math.sin(0.5 * self.phi)) * math.sin(h),
        ])


@dataclass(frozen=True)
class SpinGeometry:
    """Angle ``delta`` between the first-time axis n1 and the second-time axis n2 = z."""

    delta: float

    def __post_init__(self):
        if not 0.0 <= self.delta <= math.pi:
            raise ValueError(f"delta={self.delta} outside [0, pi]")

    @property
    def n1(self) -> np.ndarray:
        return np.array([math.sin(self.delta), 0.0, math.cos(self.delta)])

    @property
    def n2(self) -> np.ndarray:
        return np.array([0.0, 0.0, 1.0])


def spin_projector(n, sign: int) -> Projector:
    """(I + sign n.sigma) / 2."""
    ns = n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z
    return Projector(0.5 * (np.eye(2) + sign * ns))


def spin_decomposition(n) -> ProjectiveDecomposition:
    return ProjectiveDecomposition((spin_projector(n, +1), spin_projector(n, -1)), ("+", "-"))


def spin_history_set(g: SpinGeometry) -> HistorySet:
    """Chains P^{n2}_{s2}(t2) P^{n1}_{s1}(t1) with H = 0, ordered (++, +-, -+, --) as (s2, s1)."""
    h = Hamiltonian.zero(2)
    d1 = spin_decomposition(g.n1)
    d2 = spin_decomposition(g.n2)
    members = [chain_class_operator([(d1, i1, 0.0), (d2, i2, 1.0)], h) for i2 in (0, 1) for i1 in (0, 1)]
    return HistorySet(tuple(members), SPIN_LABELS)


def spin_candidate_probabilities(s: SpinState, g: SpinGeometry) -> tuple:
    p = kernels.spin_probabilities(s.theta, s.phi, g.delta)
    return tuple(float(v) for v in p)


def spin_md_offdiagonals(s: SpinState, g: SpinGeometry) -> tuple:
    """(<Psi_{++}|Psi_{+-}>, <Psi_{--}|Psi_{-+}>), branches labelled (s2, s1)."""
    st, ct = math.sin(s.theta), math.cos(s.theta)
    sd, cd = math.sin(g.delta), math.cos(g.delta)
    cp, sp = math.cos(s.phi), math.sin(s.phi)
    upper = 0.25 * sd * complex(ct * sd - st * cd * cp, st * sp)
    lower = 0.25 * sd * complex(-ct * sd + st * cd * cp, st * sp)
    return upper, lower


@dataclass(frozen=True, eq=False)
class PositivityRegionGrid:
    delta: float
    theta: np.ndarray
    phi: np.ndarray
    min_probability: np.ndarray  # [theta, phi]
    threshold: float

    @property
    def positive(self) -> np.ndarray:
        return self.min_probability >= self.threshold

    @property
    def negative_cells(self) -> int:
        return int((~self.positive).sum())


def spin_positivity_region(delta: float, theta_grid, phi_grid, threshold: float = LP_GRID_THRESHOLD):
    th = np.ascontiguousarray(theta_grid, dtype=float)
    ph = np.ascontiguousarray(phi_grid, dtype=float)
    if th.size == 0 or ph.size == 0:
        raise ValueError("grids must be non-empty")
    m = np.asarray(kernels.spin_min_grid(float(delta), th, ph))
    return PositivityRegionGrid(float(delta), th, ph, m, threshold)


class ThreeBox:
    """A particle in one of three boxes A, B, C with H = 0.

    Initial state (A + B + C)/sqrt(3); the final-time alternative is whether
    the particle is in (A + B - C)/sqrt(3).  Intermediate alternatives are
    box occupations.  Times are nominal: only their order matters.
    """

    T_B, T_A, T_FINAL = 0.5, 1.0, 2.0

    def __init__(self):
        e = np.eye(3)
        self.psi = StateVector(np.array([1, 1, 1]) / math.sqrt(3))
        self.phi = StateVector(np.array([1, 1, -1]) / math.sqrt(3))
        self.hamiltonian = Hamiltonian.zero(3)
        self.P_phi = make_projector([self.phi.amplitudes])
        self.P_A = make_projector([e[0]])
        self.P_B = make_projector([e[1]])
        self.P_C = make_projector([e[2]])
        self.final = ProjectiveDecomposition.binary(self.P_phi, ("Φ", "Φ̄"))
        self.box_a = ProjectiveDecomposition.binary(self.P_A, ("A", "Ā"))
        self.box_b = ProjectiveDecomposition.binary(self.P_B, ("B", "B̄"))
        self.boxes = ProjectiveDecomposition((self.P_A, self.P_B, self.P_C), ("A", "B", "C"))

    def _chain(self, i_phi, i_a=None, i_b=None) -> ClassOperator:
        steps = []
        if i_b is not None:
            steps.append((self.box_b, i_b, self.T_B))
        if i_a is not None:
            steps.append((self.box_a, i_a, self.T_A))
        if i_phi is not None:
            steps.append((self.final, i_phi, self.T_FINAL))
        return chain_class_operator(steps, self.hamiltonian)

    @cached_property
    def coarse_set(self) -> HistorySet:
        """Four histories: Phi or not at the end, A or not in between."""
        return HistorySet(tuple(self._chain(f, a) for a, f in [(0, 0), (0, 1), (1, 0), (1, 1)]))

    @cached_property
    def fine_set(self) -> HistorySet:
        """Eight histories: Phi or not, A or not, B or not."""
        order = [(0, 0, 0), (1, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, 1)]
        return HistorySet(tuple(self._chain(f, a, b) for f, a, b in order))

    @cached_property
    def full_fine_set(self) -> HistorySet:
        """The same eight histories in Cartesian-product order."""
        return full_chain_set(
            [(self.box_b, self.T_B), (self.box_a, self.T_A), (self.final, self.T_FINAL)], self.hamiltonian
        )

    def coarse_partition(self):
        """Blocks of ``full_fine_set`` that sum over the B alternative."""
        from .histories import Partition

        labels = self.full_fine_set.labels
        key = [lab.rsplit(",", 1)[0] + ")" for lab in labels]
        return Partition.from_assignment(key)

    def phi_condition(self) -> ClassOperator:
        return self._chain(0)

    def conditioned(self, i_a, i_b) -> ClassOperator:
        return self._chain(0, i_a, i_b)

    def future_set(self) -> HistorySet:
        """In A or not at a time after the final Phi check (labels A^f, not-A^f)."""
        d = ProjectiveDecomposition.binary(self.P_A, ("Aᶠ", "Āᶠ"))
        h = self.hamiltonian
        return HistorySet(tuple(chain_class_operator([(d, i, 3.0)], h) for i in (0, 1)), ("Aᶠ", "Āᶠ"))

    def past_set(self) -> HistorySet:
        h = self.hamiltonian
        return HistorySet(
            tuple(chain_class_operator([(self.boxes, i, 0.0)], h) for i in range(3)), ("Aᵖ", "Bᵖ", "Cᵖ")
        )


def three_box_model() -> ThreeBox:
    return ThreeBox()
