from .encode import (
    Admissibility, Atom, AuxDef, EncodedConstraint, ExprEncoder, Outcome, admissibility,
    encode_all, encode_constraint, encode_guard, map_images, minor_poly, trace_poly,
)
from .polynomial import (
    Poly, PolyParseError, StateEnv, classical_symbols, format_assignment, format_poly,
    matrix_symbols, monomials, parse_assignment, parse_poly, state_symbols,
)
from .sampling import (
    CheckError, NotRefuted, RefutedAt, check_assignment, complete_assignment, random_rho,
    sample_states,
)
from .smt import coefficient_name, export_smt_check, export_smt_synthesis, template

__all__ = [
    "Admissibility", "Atom", "AuxDef", "CheckError", "EncodedConstraint", "ExprEncoder",
    "NotRefuted", "Outcome", "Poly", "PolyParseError", "RefutedAt", "StateEnv", "admissibility",
    "check_assignment", "classical_symbols", "coefficient_name", "complete_assignment",
    "encode_all", "encode_constraint", "encode_guard", "export_smt_check",
    "export_smt_synthesis", "format_assignment", "format_poly", "map_images", "matrix_symbols",
    "minor_poly", "monomials", "parse_assignment", "parse_poly", "random_rho", "sample_states",
    "state_symbols", "template", "trace_poly",
]
