"""Candidate probabilities and decoherence conditions for quantum histories."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .hilbert import (
    ClassOperator,
    Classification,
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
    decoherence_functional,
    full_chain_set,
    heisenberg_projector,
    hermitian_product_eigenvalues,
    make_projector,
)
