from .gf2_linear.gf2_linear import AffineMap, BitMatrix, BitVec, affine_rank, max_isotropic_dim, null_space, rank
from .pauli_monomial.pauli_monomial import MonomialOperator, PauliString, compose, conjugate, inverse
from .gates.gates import CCX, CX, MCX, X, Circuit, CircuitGate, CycleStructure, FAMILIES, PermutationGate, \
    add_control, canonical_notation, circuit_to_monomial, circuit_to_permutation, from_cycle_structure, \
    to_cycle_structure
from .gates.circuit_io import format_circuit, load_circuit, parse_circuit
from .hierarchy.hierarchy import DiagGroupSpec, DiagKind, Level, LevelOracle, NotInCHUpTo, diag_group_order, \
    diagonal_level, generate_diag_group, is_clifford, is_pauli, is_semi_clifford, level
from .affine_classify.affine_classify import AEInvariantProfile, ClassRecord, EquivalenceAction, \
    classify_cycle_structures, count_ae_classes_full, extend_classification, verify_4q_representatives
from .search_ch3.search_ch3 import DiagClass, FullDiagClass, SweepReport, algorithm1, build_diagonal, \
    exclusion_filters

__all__ = ["AEInvariantProfile",
           "AffineMap",
           "BitMatrix",
           "BitVec",
           "CCX",
           "CX",
           "Circuit",
           "CircuitGate",
           "ClassRecord",
           "CycleStructure",
           "DiagClass",
           "DiagGroupSpec",
           "DiagKind",
           "EquivalenceAction",
           "FAMILIES",
           "FullDiagClass",
           "Level",
           "LevelOracle",
           "MCX",
           "MonomialOperator",
           "NotInCHUpTo",
           "PauliString",
           "PermutationGate",
           "SweepReport",
           "X",
           "add_control",
           "affine_rank",
           "algorithm1",
           "build_diagonal",
           "canonical_notation",
           "circuit_to_monomial",
           "circuit_to_permutation",
           "classify_cycle_structures",
           "compose",
           "conjugate",
           "count_ae_classes_full",
           "diag_group_order",
           "diagonal_level",
           "exclusion_filters",
           "extend_classification",
           "format_circuit",
           "from_cycle_structure",
           "generate_diag_group",
           "inverse",
           "is_clifford",
           "is_pauli",
           "is_semi_clifford",
           "level",
           "load_circuit",
           "max_isotropic_dim",
           "null_space",
           "parse_circuit",
           "rank",
           "to_cycle_structure",
           "verify_4q_representatives",]
