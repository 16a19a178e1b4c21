from .ast import (
    Assign, BinOp, BoolLit, CoinToss, Expr, GateApp, Geo, If, InitPlus, Measure, NatLit, Not,
    Program, Reset, Seq, Skip, Stmt, Var, While, eval_expr, expr_vars, is_loop_free, seq,
    seq_items, statement_count, walk,
)
from .desugar import assign_labels, desugar, label_count, prepare
from .gates import ARITY, GATE_NAMES, embed, embedded_gate, gate_matrix, projector, reset_kraus
from .parser import (
    ArityError, LexError, ParseError, SyntaxProblem, TypeCheckError, parse, parse_surface, tokenize,
)
from .printer import format_expr, format_program, format_stmt

__all__ = [
    "ARITY", "ArityError", "Assign", "BinOp", "BoolLit", "CoinToss", "Expr", "GATE_NAMES",
    "GateApp", "Geo", "If", "InitPlus", "LexError", "Measure", "NatLit", "Not", "ParseError",
    "Program", "Reset", "Seq", "Skip", "Stmt", "SyntaxProblem", "TypeCheckError", "Var", "While",
    "assign_labels", "desugar", "embed", "embedded_gate", "eval_expr", "expr_vars",
    "format_expr", "format_program", "format_stmt", "gate_matrix", "is_loop_free", "label_count",
    "parse", "parse_surface", "prepare", "projector", "reset_kraus", "seq", "seq_items",
    "statement_count", "tokenize", "walk",
]
