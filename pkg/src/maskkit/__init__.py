"""Masking of quantum state sets whose Gram matrix has a flat eigenbasis.

The package certifies whether a family of pure states admits a Hadamard
eigenbasis for its Gram matrix, builds the bipartite states and the unitary
that hide every member in identical subsystem marginals, and characterizes
which linear combinations stay hidden by the same unitary.
"""

from .gram import (
    HadamardCertificate,
    NotCertified,
    StateSet,
    certify_hadamard_set,
    flatten_eigenspace,
    gram_matrix,
    random_states_with_gram,
)
from .hadamard import (
    HadamardCheck,
    HadamardUnitary,
    dephase,
    fourier_hadamard,
    is_hadamard_unitary,
    qubit_family,
    sylvester_hadamard,
)
from .linalg import (
    DEFAULT_TOL,
    EigenGroup,
    canonicalize_columns,
    complete_isometry,
    group_eigenspaces,
    hermitian_eig,
    partial_trace,
    random_isometry,
    random_state,
    random_unitary,
    schmidt_decompose,
    tensor_product,
)
from .masking import (
    CombinationCheck,
    FixedReducingSet,
    Infeasible,
    Masker,
    MaskingReport,
    QubitTripleSolution,
    build_masker,
    combination_condition,
    combine,
    fixed_reducing_states,
    maskable_with,
    sample_maskable,
    solve_qubit_phases,
    torus_residuals,
    verify_masking,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "DEFAULT_TOL",
    "CombinationCheck",
    "EigenGroup",
    "FixedReducingSet",
    "HadamardCertificate",
    "HadamardCheck",
    "HadamardUnitary",
    "Infeasible",
    "Masker",
    "MaskingReport",
    "NotCertified",
    "QubitTripleSolution",
    "StateSet",
    "build_masker",
    "canonicalize_columns",
    "certify_hadamard_set",
    "combination_condition",
    "combine",
    "complete_isometry",
    "dephase",
    "fixed_reducing_states",
    "flatten_eigenspace",
    "fourier_hadamard",
    "gram_matrix",
    "group_eigenspaces",
    "hermitian_eig",
    "is_hadamard_unitary",
    "maskable_with",
    "partial_trace",
    "qubit_family",
    "random_isometry",
    "random_state",
    "random_states_with_gram",
    "random_unitary",
    "sample_maskable",
    "schmidt_decompose",
    "solve_qubit_phases",
    "sylvester_hadamard",
    "tensor_product",
    "torus_residuals",
    "verify_masking",
]
