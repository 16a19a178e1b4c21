"""Symbolic inference: expectation terms plus guarded side conditions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..syntax import (
    Assign, Expr, GateApp, If, Measure, NatLit, Not, Program, Reset, Seq, Skip, Stmt, While,
    format_expr,
)
from .terms import (
    Bary, ClassicalAssign, ETerm, EVar, Subst, format_eterm, gate_map, label_var,
    measurement_map, prob, reset_map,
)

# ------------------------------------------------------------------ guards


@dataclass(frozen=True)
class BoolGuard:
    expr: Expr

    def __str__(self) -> str:
        return format_expr(self.expr)


@dataclass(frozen=True)
class ProbZero:
    """p_{k,i} = 0."""

    k: int
    qubit: int
    qname: str

    def __str__(self) -> str:
        return f"p{self.k}({self.qname}) = 0"


@dataclass(frozen=True)
class ProbNonzero:
    """p_{0,i} != 0 and p_{1,i} != 0."""

    qubit: int
    qname: str

    def __str__(self) -> str:
        return f"p0({self.qname}) != 0 and p1({self.qname}) != 0"


Guard = Union[BoolGuard, ProbZero, ProbNonzero]


@dataclass(frozen=True)
class Constraint:
    """``guard |- lhs <= X_label``; ``order`` is the emission index."""

    guard: Guard
    lhs: ETerm
    label: int
    order: int

    @property
    def rhs(self) -> EVar:
        return label_var(self.label)


def format_constraint(c: Constraint, index: int | None = None) -> str:
    head = f"G{c.order if index is None else index}"
    return f"{head} {c.guard} |- {format_eterm(c.lhs)} <= {c.rhs}"


def sort_constraints(cs: list[Constraint]) -> list[Constraint]:
    return sorted(cs, key=lambda c: (c.label, c.order))


def dump_constraints(cs: list[Constraint]) -> str:
    return "".join(format_constraint(c, i) + "\n" for i, c in enumerate(sort_constraints(cs)))


# ------------------------------------------------------------------ the transformer


class _Inference:
    def __init__(self, qubits: tuple[str, ...]) -> None:
        self.qubits = qubits
        self.m = len(qubits)
        self.constraints: list[Constraint] = []

    def emit(self, guard: Guard, lhs: ETerm, label: int) -> None:
        self.constraints.append(Constraint(guard, lhs, label, len(self.constraints)))

    def run(self, s: Stmt, f: ETerm) -> ETerm:
        if isinstance(s, Skip):
            return f
        if isinstance(s, Assign):
            return Subst(f, ClassicalAssign(s.var, s.expr))
        if isinstance(s, Seq):
            return self.run(s.first, self.run(s.second, f))
        if isinstance(s, GateApp):
            label = ",".join(s.qubits)
            return Subst(f, gate_map(s.gate, s.targets, self.m, label))
        if isinstance(s, Reset):
            return Subst(f, reset_map(s.qindex, self.m, s.qubit))
        self._check_label(s)
        x = label_var(s.label)  # type: ignore[union-attr]
        if isinstance(s, If):
            g1 = self.run(s.then, f)
            g2 = self.run(s.orelse, f)
            self.emit(BoolGuard(s.cond), g1, s.label)
            self.emit(BoolGuard(Not(s.cond)), g2, s.label)
            return x
        if isinstance(s, While):
            g = self.run(s.body, x)
            self.emit(BoolGuard(s.cond), g, s.label)
            self.emit(BoolGuard(Not(s.cond)), f, s.label)
            return x
        if isinstance(s, Measure):
            i, q = s.qindex, s.qubit
            branch = [
                Subst(Subst(f, ClassicalAssign(s.target, NatLit(k))), measurement_map(k, i, self.m, q))
                for k in (0, 1)
            ]
            self.emit(ProbZero(0, i, q), branch[1], s.label)
            self.emit(ProbZero(1, i, q), branch[0], s.label)
            self.emit(ProbNonzero(i, q), Bary(branch[0], prob(0, i, self.m, q), branch[1]), s.label)
            return x
        raise TypeError(f"cannot infer {type(s).__name__}; desugar the program first")

    @staticmethod
    def _check_label(s: Stmt) -> None:
        if getattr(s, "label", -1) < 0:
            raise ValueError("statement is not labelled; run the program through prepare()")


def qinfer(stmt: Stmt, f: ETerm, qubits: tuple[str, ...]) -> tuple[ETerm, list[Constraint]]:
    """Term for the pre-expectation of ``f`` and the side conditions on label variables."""
    inf = _Inference(qubits)
    g = inf.run(stmt, f)
    return g, inf.constraints


def infer_program(program: Program, post: str = "X") -> tuple[ETerm, list[Constraint]]:
    return qinfer(program.body, EVar(post), program.qubits)
