"""Exact interpretation of expectation terms, constraints and the structural transformer."""

from __future__ import annotations

import enum
from typing import Callable, Mapping, Protocol, Union

from .. import linalg
from ..algebraic import ZERO, FieldElem, RealField
from ..semantics import DensityMatrix, State, Store, apply_gate, measure, reset_qubit
from ..syntax import (
    Assign, GateApp, If, Measure, Reset, Seq, Skip, Stmt, While, eval_expr,
)
from .normalize import CommonForm, NormalSum, NormalTerm, TracePoly
from .qinfer import BoolGuard, Constraint, Guard, ProbNonzero, ProbZero
from .terms import (
    Bary, ClassicalAssign, ETerm, EVar, PConst, PDiv, PMul, POneMinus, ProbTerm, PTrace,
    QuantumMap, Scale, Subst, Sum,
)

R0 = RealField(0)
R1 = RealField(1)


class ZeroDenominatorError(ArithmeticError):
    """A normalising trace vanished: the state violates the guard protecting it."""


class _HasAtState(Protocol):
    def at_state(self, store: Store, rho: DensityMatrix) -> RealField: ...


Expectation = Union[Callable[[Store, DensityMatrix], RealField], _HasAtState]
Assignment = Mapping[str, Expectation]


def _call(f: Expectation, store: Store, rho: DensityMatrix) -> RealField:
    at = getattr(f, "at_state", None)
    v = at(store, rho) if at is not None else f(store, rho)  # type: ignore[operator]
    return RealField.coerce(v)


# ------------------------------------------------------------------ probabilities and maps


def trace_with(w: linalg.Matrix, rho: DensityMatrix) -> RealField:
    """tr(W rho)."""
    acc = ZERO
    ent = rho.entries
    n = len(w)
    for j in range(n):
        row = w[j]
        for k in range(n):
            x = row[k]
            if not x.is_zero():
                acc = acc + x * ent[k][j]
    return acc.real_part()


def eval_prob(p: ProbTerm, rho: DensityMatrix) -> RealField:
    if isinstance(p, PConst):
        return p.value
    if isinstance(p, PTrace):
        return trace_with(p.effect, rho)
    if isinstance(p, POneMinus):
        return 1 - eval_prob(p.p, rho)
    if isinstance(p, PMul):
        a = eval_prob(p.left, rho)
        # the left factor guards the right one
        return a if a.is_zero() else a * eval_prob(p.right, rho)
    if isinstance(p, PDiv):
        d = eval_prob(p.den, rho)
        if d.is_zero():
            raise ZeroDenominatorError(f"denominator {p.den} vanishes")
        return eval_prob(p.num, rho) / d
    raise TypeError(p)


def apply_map(chi: QuantumMap, rho: DensityMatrix) -> DensityMatrix:
    d = trace_with(chi.effect, rho)
    if d.is_zero():
        raise ZeroDenominatorError(f"normalisation of {chi} vanishes")
    acc = linalg.zeros(rho.dim)
    for k in chi.kraus:
        acc = linalg.add(acc, linalg.conjugate_by(k, rho.entries))
    if d != R1:
        acc = linalg.scale(FieldElem.from_real(d).inverse(), acc)
    return DensityMatrix(acc)


def _update(u: ClassicalAssign | QuantumMap, store: Store, rho: DensityMatrix) -> tuple[Store, DensityMatrix]:
    if isinstance(u, ClassicalAssign):
        return store.set(u.var, eval_expr(u.expr, store)), rho
    return store, apply_map(u, rho)


# ------------------------------------------------------------------ terms


def eval_eterm(t: ETerm, alpha: Assignment, sigma: State) -> RealField:
    """Value of ``t`` at ``sigma`` when every variable X is read as ``alpha[X]``."""
    store, rho = sigma
    if isinstance(t, EVar):
        if t.name not in alpha:
            raise KeyError(f"assignment has no value for {t.name}")
        return _call(alpha[t.name], store, rho)
    if isinstance(t, Subst):
        return eval_eterm(t.term, alpha, State(*_update(t.update, store, rho)))
    if isinstance(t, Bary):
        p = eval_prob(t.p, rho)
        if p.is_zero():
            return eval_eterm(t.right, alpha, sigma)
        if p == R1:
            return eval_eterm(t.left, alpha, sigma)
        return p * eval_eterm(t.left, alpha, sigma) + (1 - p) * eval_eterm(t.right, alpha, sigma)
    if isinstance(t, Scale):
        p = eval_prob(t.p, rho)
        return R0 if p.is_zero() else p * eval_eterm(t.term, alpha, sigma)
    if isinstance(t, Sum):
        return eval_eterm(t.left, alpha, sigma) + eval_eterm(t.right, alpha, sigma)
    raise TypeError(t)


def eval_body(t: NormalTerm, alpha: Assignment, sigma: State) -> RealField:
    """The term without its coefficient."""
    store, rho = sigma
    for c in reversed(t.chain):
        store = store.set(c.var, eval_expr(c.expr, store))
    if t.qmap is not None:
        rho = apply_map(t.qmap, rho)
    return _call(alpha[t.var.name], store, rho)


def eval_normal(ns: NormalSum, alpha: Assignment, sigma: State) -> RealField:
    acc = R0
    for t in ns.terms:
        p = eval_prob(t.coeff, sigma.rho)
        if not p.is_zero():
            acc = acc + p * eval_body(t, alpha, sigma)
    return acc


def eval_trace_poly(q: TracePoly, rho: DensityMatrix) -> RealField:
    acc = R0
    for atoms, c in q.terms.items():
        v = c
        for a in atoms:
            v = v * trace_with(a.effect, rho)
        acc = acc + v
    return acc


def eval_common(cf: CommonForm, alpha: Assignment, sigma: State) -> tuple[RealField, RealField]:
    """Both sides' trace multipliers: ``(sum_i Q_i * term_i, Q)``."""
    acc = R0
    for q, t in zip(cf.numerators, cf.terms):
        qv = eval_trace_poly(q, sigma.rho)
        if not qv.is_zero():
            acc = acc + qv * eval_body(t, alpha, sigma)
    return acc, eval_trace_poly(cf.denominator, sigma.rho)


# ------------------------------------------------------------------ constraints


class Verdict(enum.Enum):
    HOLDS = "Holds"
    VIOLATED = "Violated"
    GUARD_FALSE = "GuardFalse"


def guard_holds(g: Guard, sigma: State) -> bool:
    if isinstance(g, BoolGuard):
        return eval_expr(g.expr, sigma.store) != 0
    if isinstance(g, ProbZero):
        return sigma.rho.probability(g.qubit, g.k).is_zero()
    if isinstance(g, ProbNonzero):
        return not sigma.rho.probability(g.qubit, 0).is_zero() and not sigma.rho.probability(g.qubit, 1).is_zero()
    raise TypeError(g)


def constraint_sides(c: Constraint, alpha: Assignment, sigma: State) -> tuple[RealField, RealField]:
    return eval_eterm(c.lhs, alpha, sigma), eval_eterm(c.rhs, alpha, sigma)


def check_constraint(c: Constraint, alpha: Assignment, sigma: State) -> Verdict:
    if not guard_holds(c.guard, sigma):
        return Verdict.GUARD_FALSE
    lhs, rhs = constraint_sides(c, alpha, sigma)
    return Verdict.HOLDS if lhs <= rhs else Verdict.VIOLATED


# ------------------------------------------------------------------ the structural transformer


def wpt(stmt: Stmt, f: Expectation) -> Callable[[Store, DensityMatrix], RealField]:
    """Pre-expectation of a loop-free statement, computed by structural recursion."""
    if isinstance(stmt, Skip):
        return lambda s, r: _call(f, s, r)
    if isinstance(stmt, Assign):
        return lambda s, r: _call(f, s.set(stmt.var, eval_expr(stmt.expr, s)), r)
    if isinstance(stmt, GateApp):
        return lambda s, r: _call(f, s, apply_gate(stmt.gate, stmt.targets, r))
    if isinstance(stmt, Reset):
        return lambda s, r: _call(f, s, reset_qubit(stmt.qindex, r))
    if isinstance(stmt, Seq):
        return wpt(stmt.first, wpt(stmt.second, f))
    if isinstance(stmt, If):
        g1, g2 = wpt(stmt.then, f), wpt(stmt.orelse, f)
        return lambda s, r: g1(s, r) if eval_expr(stmt.cond, s) else g2(s, r)
    if isinstance(stmt, Measure):
        def g(s: Store, r: DensityMatrix) -> RealField:
            acc = R0
            for k, (p, rk) in enumerate(measure(r, stmt.qindex)):
                if not p.is_zero():
                    acc = acc + p * _call(f, s.set(stmt.target, k), rk)
            return acc
        return g
    if isinstance(stmt, While):
        raise ValueError("loops need a fixed point; use the step semantics or inference instead")
    raise TypeError(f"cannot transform {type(stmt).__name__}")


def wpt_eval(stmt: Stmt, f: Expectation, sigma: State) -> RealField:
    return wpt(stmt, f)(sigma.store, sigma.rho)
