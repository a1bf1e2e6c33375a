"""Finite-dimensional CP*-categories, dagger bimodules and the teleportation equation."""
from .bimodule import (
    BimoduleHom,
    DaggerBimodule,
    associator_comparison,
    check_bimodule,
    check_hom,
    check_topological_boundary,
    coequalizer_deviation,
    compose_bimodules,
    composite_idempotent,
    horizontal_compose_homs,
    identity_bimodule,
    unitor_comparisons,
)
from .cpstar import (
    CPMap,
    CStarAlgebra,
    choi_blocks,
    compose_cp,
    cp_witness,
    is_completely_positive,
    tensor_cp,
)
from .frobenius import (
    FrobeniusAlgebra,
    check_frobenius,
    classical_structure,
    copyable_states,
    matrix_algebra,
)
from .groupoid import (
    FiniteGroupoid,
    algebra_to_groupoid,
    cyclic_group,
    find_isomorphism,
    groupoid_to_algebra,
    validate_groupoid,
)
from .linalg import ShapeError, TwoCPError, Verdict, VerificationError, split_projection
from .matrix_model import (
    AlgebraMatrix,
    CPMatrix,
    compose_matrix_model,
    from_matrix_of_algebras,
    to_matrix_of_algebras,
)
from .protocols import (
    POVM,
    Measurement,
    TeleportationData,
    check_security,
    check_teleportation,
    is_measurement,
    measurement_from_povm,
    one_time_pad,
    povm_from_measurement,
    standard_qubit_teleportation,
)

__version__ = "0.1.0"
