from .evaluate import (
    Assignment, Expectation, Verdict, ZeroDenominatorError, apply_map, check_constraint,
    constraint_sides, eval_body, eval_common, eval_eterm, eval_normal, eval_prob,
    eval_trace_poly, guard_holds, trace_with, wpt, wpt_eval,
)
from .normalize import (
    CommonForm, NormalSum, NormalTerm, TracePoly, common_denominator, normalize, rewrite,
    rewrite_root, to_fraction,
)
from .qinfer import (
    BoolGuard, Constraint, Guard, ProbNonzero, ProbZero, dump_constraints, format_constraint,
    infer_program, qinfer, sort_constraints,
)
from .terms import (
    P_ONE, P_ZERO, Bary, ClassicalAssign, ETerm, EVar, PConst, PDiv, PMul, POneMinus, ProbTerm,
    PTrace, QuantumMap, Scale, Subst, Sum, Update, compose_prob, evars, format_eterm, gate_map,
    identity_map, label_var, measurement_map, one_minus, pdiv, pmul, prob, ptrace, reset_map,
    subst_chain,
)

__all__ = [
    "Assignment", "Bary", "BoolGuard", "ClassicalAssign", "CommonForm", "Constraint", "ETerm",
    "EVar", "Expectation", "Guard", "NormalSum", "NormalTerm", "PConst", "PDiv", "PMul",
    "POneMinus", "PTrace", "P_ONE", "P_ZERO", "ProbNonzero", "ProbTerm", "ProbZero",
    "QuantumMap", "Scale", "Subst", "Sum", "TracePoly", "Update", "Verdict",
    "ZeroDenominatorError", "apply_map", "check_constraint", "common_denominator",
    "compose_prob", "constraint_sides", "dump_constraints", "eval_body", "eval_common",
    "eval_eterm", "eval_normal", "eval_prob", "eval_trace_poly", "evars", "format_constraint",
    "format_eterm", "gate_map", "guard_holds", "identity_map", "infer_program", "label_var",
    "measurement_map", "normalize", "one_minus", "pdiv", "pmul", "prob", "ptrace", "qinfer",
    "reset_map", "rewrite", "rewrite_root", "sort_constraints", "subst_chain", "to_fraction",
    "trace_with", "wpt", "wpt_eval",
]
