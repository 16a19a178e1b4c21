"""Canonical pretty-printer; its output parses back to the same tree."""

from __future__ import annotations

from .ast import (
    Assign, BinOp, BoolLit, CoinToss, Expr, GateApp, Geo, If, InitPlus, Measure, NatLit, Not,
    Program, Reset, Seq, Skip, Stmt, Var, While, seq_items,
)

_PREC = {"or": 1, "and": 2, "=": 4, "<": 4, "+": 5, "-": 5, "*": 6}
_NOT_PREC = 3
_ATOM = 7


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Not):
        return _NOT_PREC
    return _ATOM


def format_expr(e: Expr, min_prec: int = 0) -> str:
    if isinstance(e, Var):
        text = e.name
    elif isinstance(e, NatLit):
        text = str(e.value)
    elif isinstance(e, BoolLit):
        text = "tt" if e.value else "ff"
    elif isinstance(e, Not):
        text = "not " + format_expr(e.operand, _NOT_PREC)
    else:
        p = _PREC[e.op]
        if e.op in ("=", "<"):
            # comparisons do not chain
            text = f"{format_expr(e.left, p + 1)} {e.op} {format_expr(e.right, p + 1)}"
        else:
            text = f"{format_expr(e.left, p)} {e.op} {format_expr(e.right, p + 1)}"
    return f"({text})" if _prec(e) < min_prec else text


def _block(s: Stmt, indent: int) -> str:
    pad = "  " * indent
    return "{\n" + _stmts(s, indent + 1) + "\n" + pad + "}"


def _stmts(s: Stmt, indent: int) -> str:
    return ";\n".join(format_stmt(x, indent) for x in seq_items(s))


def format_stmt(s: Stmt, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(s, Seq):
        return _stmts(s, indent)
    if isinstance(s, Skip):
        return pad + "skip"
    if isinstance(s, Assign):
        return f"{pad}{s.var} := {format_expr(s.expr)}"
    if isinstance(s, If):
        head = f"{pad}if {format_expr(s.cond)} then {_block(s.then, indent)}"
        if isinstance(s.orelse, Skip):
            return head
        return f"{head} else {_block(s.orelse, indent)}"
    if isinstance(s, While):
        return f"{pad}while {format_expr(s.cond)} do {_block(s.body, indent)}"
    if isinstance(s, GateApp):
        return f"{pad}{', '.join(s.qubits)} *= {s.gate}"
    if isinstance(s, Measure):
        return f"{pad}{s.target} := meas {s.qubit}"
    if isinstance(s, Reset):
        return f"{pad}{s.qubit} := |0>"
    if isinstance(s, InitPlus):
        return f"{pad}{s.qubit} := |+>"
    if isinstance(s, CoinToss):
        return f"{pad}{s.target} := cointoss()"
    if isinstance(s, Geo):
        return f"{pad}{s.target} := geo()"
    raise TypeError(f"not a statement: {s!r}")


def format_program(p: Program) -> str:
    lines = []
    for kw, names in (("bool", p.bool_vars), ("nat", p.nat_vars), ("qubit", p.qubits)):
        if names:
            lines.append(f"{kw} {', '.join(names)};")
    lines.append(format_stmt(p.body))
    return "\n".join(lines) + "\n"
