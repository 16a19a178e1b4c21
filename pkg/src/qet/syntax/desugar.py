"""Removal of surface sugar, label assignment and qubit resolution."""

from __future__ import annotations

import itertools
from dataclasses import replace

from .ast import (
    Assign, BinOp, BoolLit, CoinToss, GateApp, Geo, If, InitPlus, Measure, NatLit, Program,
    Reset, Seq, Skip, Stmt, Var, While, seq, walk,
)

FRESH_PREFIX = "__fresh"


class _Supply:
    """Deterministic fresh names that avoid everything already declared."""

    def __init__(self, program: Program) -> None:
        self.taken = set(program.bool_vars) | set(program.nat_vars) | set(program.qubits)
        self.counter = itertools.count()
        self.bools: list[str] = []
        self.qubits: list[str] = []

    def _next(self) -> str:
        while True:
            name = f"{FRESH_PREFIX}{next(self.counter)}"
            if name not in self.taken:
                self.taken.add(name)
                return name

    def bool(self) -> str:
        name = self._next()
        self.bools.append(name)
        return name

    def qubit(self) -> str:
        name = self._next()
        self.qubits.append(name)
        return name


def _expand(s: Stmt, fresh: _Supply, keep_reset: bool) -> Stmt:
    if isinstance(s, Seq):
        return seq(_expand(s.first, fresh, keep_reset), _expand(s.second, fresh, keep_reset))
    if isinstance(s, If):
        return replace(s, then=_expand(s.then, fresh, keep_reset), orelse=_expand(s.orelse, fresh, keep_reset))
    if isinstance(s, While):
        return replace(s, body=_expand(s.body, fresh, keep_reset))
    if isinstance(s, Reset):
        if keep_reset:
            return s
        flag = fresh.bool()
        return seq(Measure(flag, s.qubit), If(Var(flag), GateApp("X", (s.qubit,)), Skip()))
    if isinstance(s, InitPlus):
        return seq(_expand(Reset(s.qubit), fresh, keep_reset), GateApp("H", (s.qubit,)))
    if isinstance(s, CoinToss):
        q = fresh.qubit()
        return seq(_expand(InitPlus(q), fresh, keep_reset), Measure(s.target, q))
    if isinstance(s, Geo):
        flag = fresh.bool()
        # count loop rounds from 0, then drop the extra one (naturals cannot start at -1)
        body = seq(_expand(CoinToss(flag), fresh, keep_reset), Assign(s.target, BinOp("+", Var(s.target), NatLit(1))))
        return seq(
            Assign(flag, BoolLit(True)),
            Assign(s.target, NatLit(0)),
            While(Var(flag), body),
            Assign(s.target, BinOp("-", Var(s.target), NatLit(1))),
        )
    return s


def desugar(program: Program, *, keep_reset: bool = False) -> Program:
    """Expand ``|0>``, ``|+>``, ``cointoss()`` and ``geo()``.

    With ``keep_reset`` the ground-state preparation stays a primitive
    statement instead of a measurement followed by a conditional flip.
    """
    fresh = _Supply(program)
    body = _expand(program.body, fresh, keep_reset)
    return Program(
        program.bool_vars + tuple(fresh.bools),
        program.nat_vars,
        program.qubits + tuple(fresh.qubits),
        body,
        program.positions,
    )


def assign_labels(program: Program) -> Program:
    """Number If/While/Measure nodes in preorder and resolve qubit names to indices."""
    counter = itertools.count()
    index = {q: i for i, q in enumerate(program.qubits)}

    def go(s: Stmt) -> Stmt:
        if isinstance(s, Seq):
            first = go(s.first)
            return Seq(first, go(s.second))
        if isinstance(s, If):
            label = next(counter)
            then = go(s.then)
            return If(s.cond, then, go(s.orelse), label)
        if isinstance(s, While):
            label = next(counter)
            return While(s.cond, go(s.body), label)
        if isinstance(s, Measure):
            return Measure(s.target, s.qubit, next(counter), index[s.qubit])
        if isinstance(s, GateApp):
            return GateApp(s.gate, s.qubits, tuple(index[q] for q in s.qubits))
        if isinstance(s, Reset):
            return Reset(s.qubit, index[s.qubit])
        if isinstance(s, (InitPlus, CoinToss, Geo)):
            raise ValueError("desugar the program before labelling it")
        return s

    return replace(program, body=go(program.body))


def prepare(program: Program) -> Program:
    """The core program that semantics and inference operate on."""
    return assign_labels(desugar(program, keep_reset=True))


def label_count(program: Program) -> int:
    return sum(1 for n in walk(program.body) if isinstance(n, (If, While, Measure)))
