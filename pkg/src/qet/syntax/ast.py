"""Abstract syntax of the mixed classical-quantum while language."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

# ------------------------------------------------------------------ expressions


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class NatLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * = < and or
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Not:
    operand: Expr


Expr = Union[Var, NatLit, BoolLit, BinOp, Not]

NAT_OPS = ("+", "-", "*")
CMP_OPS = ("=", "<")
BOOL_OPS = ("and", "or")


def eval_expr(e: Expr, store: Mapping[str, int]) -> int:
    """Evaluate under a store; booleans are 0/1 and ``-`` is monus."""
    if isinstance(e, Var):
        return store[e.name]
    if isinstance(e, NatLit):
        return e.value
    if isinstance(e, BoolLit):
        return int(e.value)
    if isinstance(e, Not):
        return 1 - eval_expr(e.operand, store)
    a = eval_expr(e.left, store)
    if e.op == "and":
        return int(a != 0 and eval_expr(e.right, store) != 0)
    if e.op == "or":
        return int(a != 0 or eval_expr(e.right, store) != 0)
    b = eval_expr(e.right, store)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return max(0, a - b)
    if e.op == "*":
        return a * b
    if e.op == "=":
        return int(a == b)
    if e.op == "<":
        return int(a < b)
    raise ValueError(f"unknown operator {e.op!r}")


def expr_vars(e: Expr) -> Iterator[str]:
    if isinstance(e, Var):
        yield e.name
    elif isinstance(e, Not):
        yield from expr_vars(e.operand)
    elif isinstance(e, BinOp):
        yield from expr_vars(e.left)
        yield from expr_vars(e.right)


# ------------------------------------------------------------------ statements


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr


@dataclass(frozen=True)
class Seq:
    first: Stmt
    second: Stmt


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Stmt
    orelse: Stmt
    label: int = -1


@dataclass(frozen=True)
class While:
    cond: Expr
    body: Stmt
    label: int = -1


@dataclass(frozen=True)
class GateApp:
    gate: str
    qubits: tuple[str, ...]
    # resolved positions in the program's qubit order
    targets: tuple[int, ...] = ()


@dataclass(frozen=True)
class Measure:
    target: str
    qubit: str
    label: int = -1
    qindex: int = -1


@dataclass(frozen=True)
class Reset:
    """``q := |0>``: re-prepare a qubit in the ground state."""

    qubit: str
    qindex: int = -1


# surface sugar, removed by desugar()


@dataclass(frozen=True)
class InitPlus:
    qubit: str


@dataclass(frozen=True)
class CoinToss:
    target: str


@dataclass(frozen=True)
class Geo:
    target: str


Stmt = Union[Skip, Assign, Seq, If, While, GateApp, Measure, Reset, InitPlus, CoinToss, Geo]


def seq(*stmts: Stmt) -> Stmt:
    """Right-associated sequence; nested sequences are flattened."""
    flat: list[Stmt] = []
    for s in stmts:
        flat.extend(seq_items(s))
    if not flat:
        return Skip()
    out = flat[-1]
    for s in reversed(flat[:-1]):
        out = Seq(s, out)
    return out


def seq_items(s: Stmt) -> list[Stmt]:
    out: list[Stmt] = []
    while isinstance(s, Seq):
        out.extend(seq_items(s.first))
        s = s.second
    out.append(s)
    return out


def walk(s: Stmt) -> Iterator[Stmt]:
    """Preorder traversal."""
    yield s
    if isinstance(s, Seq):
        yield from walk(s.first)
        yield from walk(s.second)
    elif isinstance(s, If):
        yield from walk(s.then)
        yield from walk(s.orelse)
    elif isinstance(s, While):
        yield from walk(s.body)


def is_loop_free(s: Stmt) -> bool:
    return not any(isinstance(n, (While, Geo)) for n in walk(s))


def statement_count(s: Stmt) -> int:
    """Number of non-sequence statements."""
    return sum(1 for n in walk(s) if not isinstance(n, Seq))


@dataclass(frozen=True)
class Program:
    bool_vars: tuple[str, ...]
    nat_vars: tuple[str, ...]
    qubits: tuple[str, ...]
    body: Stmt
    # source positions of declarations, for diagnostics only
    positions: Mapping[str, tuple[int, int]] = field(default_factory=dict, compare=False, repr=False)

    @property
    def classical_vars(self) -> tuple[str, ...]:
        return self.bool_vars + self.nat_vars

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    def var_type(self, name: str) -> str | None:
        if name in self.bool_vars:
            return "bool"
        if name in self.nat_vars:
            return "nat"
        if name in self.qubits:
            return "qubit"
        return None

    def labelled(self) -> dict[int, Stmt]:
        return {n.label: n for n in walk(self.body) if isinstance(n, (If, While, Measure)) and n.label >= 0}
