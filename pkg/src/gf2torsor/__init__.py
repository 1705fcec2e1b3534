"""Finite GF(2) parity-torsor constraint models.

Solvers, isomorphism construction, coset invariants and code-recovery
experiments for twisted parity models over k-subset face complexes.
"""
from .gf2 import (
    BRUTE_FORCE_VAR_LIMIT,
    CutoffCoset,
    Gf2System,
    Gf2Vec,
    brute_force_solve,
    coset_of,
    solve_linear,
    vec_add,
)
from .universe import Cell, Face, Universe
from .model import (
    AxiomCheck,
    AxiomReport,
    CosetPoint,
    Embedding,
    ModelFormatError,
    TorsorPoint,
    TwistedModel,
    canonical_model,
    check_axioms,
    extend_model,
    identity_embedding,
    parse_model,
    print_model,
    q_holds,
    q_holds_seq,
    random_canonical_model,
    standard_model,
)
from .solve import (
    Solution,
    SolutionFormatError,
    SolutionVerdict,
    SystemOfSolutions,
    Violation,
    amalgamate,
    compile_constraints,
    empty_solution,
    extend_solution,
    full_solve,
    greedy_extend,
    is_solution,
    parse_solution,
    print_solution,
    pull_back,
    random_solution,
)
from .isomap import IsoCheck, IsoMap, IsoReport, SharedBase, build_iso, verify_iso
from .invar import (
    Code,
    CodeLayout,
    CodesFormatError,
    InvariantClass,
    RecoveryEntry,
    RecoveryReport,
    Thresholds,
    build_code_model,
    chain_invariant,
    column_corruption,
    nested_invariant,
    parse_codes,
    print_codes,
    random_adversary,
    recover_codes,
    zero_anchors,
)

__version__ = "0.1.0"

__all__ = [
    "BRUTE_FORCE_VAR_LIMIT",
    "CutoffCoset",
    "Gf2System",
    "Gf2Vec",
    "brute_force_solve",
    "coset_of",
    "solve_linear",
    "vec_add",
    "Cell",
    "Face",
    "Universe",
    "AxiomCheck",
    "AxiomReport",
    "CosetPoint",
    "Embedding",
    "ModelFormatError",
    "TorsorPoint",
    "TwistedModel",
    "canonical_model",
    "check_axioms",
    "extend_model",
    "identity_embedding",
    "parse_model",
    "print_model",
    "q_holds",
    "q_holds_seq",
    "random_canonical_model",
    "standard_model",
    "Solution",
    "SolutionFormatError",
    "SolutionVerdict",
    "SystemOfSolutions",
    "Violation",
    "amalgamate",
    "compile_constraints",
    "empty_solution",
    "extend_solution",
    "full_solve",
    "greedy_extend",
    "is_solution",
    "parse_solution",
    "print_solution",
    "pull_back",
    "random_solution",
    "IsoCheck",
    "IsoMap",
    "IsoReport",
    "SharedBase",
    "build_iso",
    "verify_iso",
    "Code",
    "CodeLayout",
    "CodesFormatError",
    "InvariantClass",
    "RecoveryEntry",
    "RecoveryReport",
    "Thresholds",
    "build_code_model",
    "chain_invariant",
    "column_corruption",
    "nested_invariant",
    "parse_codes",
    "print_codes",
    "random_adversary",
    "recover_codes",
    "zero_anchors",
    "__version__",
]
