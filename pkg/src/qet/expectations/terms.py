"""Symbolic expectation terms, state updates and probability terms."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

from .. import linalg
from ..algebraic import RealField, format_real
from ..linalg import Matrix
from ..syntax import Expr, embedded_gate, format_expr, projector, reset_kraus

# ------------------------------------------------------------------ state updates


@dataclass(frozen=True)
class ClassicalAssign:
    var: str
    expr: Expr

    def __str__(self) -> str:
        return f"{self.var} := {format_expr(self.expr)}"


@dataclass(frozen=True)
class QuantumMap:
    """``rho -> sum_k K rho K^dagger / tr(W rho)``.

    ``effect`` is the hermitian operator W of the normalising trace; W = I
    means no normalisation (density matrices have unit trace).
    """

    kraus: tuple[Matrix, ...]
    effect: Matrix
    name: str = field(default="", compare=False)

    @property
    def dim(self) -> int:
        return len(self.effect)

    @property
    def normalized(self) -> bool:
        """True when the map needs no renormalisation."""
        return linalg.is_identity(self.effect)

    def compose(self, psi: QuantumMap) -> QuantumMap:
        """``self o psi``: apply ``psi`` first.  The inner normaliser cancels."""
        kraus = tuple(linalg.matmul(m, o) for m in self.kraus for o in psi.kraus)
        kraus = tuple(k for k in kraus if any(not x.is_zero() for row in k for x in row))
        effect = pullback(self.effect, psi)
        return QuantumMap(kraus, effect, f"{self.name} o {psi.name}")

    def __str__(self) -> str:
        return self.name or "chi"


def pullback(w: Matrix, psi: QuantumMap) -> Matrix:
    """The effect ``sum_k O_k^dagger W O_k`` of ``tr(W psi(rho))`` up to psi's normaliser."""
    acc = linalg.zeros(len(w))
    for o in psi.kraus:
        acc = linalg.add(acc, linalg.matmul(linalg.dagger(o), linalg.matmul(w, o)))
    return acc


def identity_map(m: int) -> QuantumMap:
    i = linalg.identity(2 ** m)
    return QuantumMap((i,), i, "id")


@lru_cache(maxsize=1024)
def gate_map(gate: str, targets: tuple[int, ...], m: int, label: str) -> QuantumMap:
    u = embedded_gate(gate, targets, m)
    return QuantumMap((u,), linalg.identity(2 ** m), f"{gate}({label})")


@lru_cache(maxsize=1024)
def measurement_map(k: int, qubit: int, m: int, label: str) -> QuantumMap:
    """The post-measurement state m_{k,i}."""
    p = projector(k, qubit, m)
    return QuantumMap((p,), p, f"m{k}({label})")


@lru_cache(maxsize=1024)
def reset_map(qubit: int, m: int, label: str) -> QuantumMap:
    return QuantumMap(reset_kraus(qubit, m), linalg.identity(2 ** m), f"reset({label})")


Update = Union[ClassicalAssign, QuantumMap]

# ------------------------------------------------------------------ probability terms


@dataclass(frozen=True)
class PConst:
    value: RealField

    def __str__(self) -> str:
        return format_real(self.value)


@dataclass(frozen=True)
class PTrace:
    """``rho -> tr(W rho)``."""

    effect: Matrix
    name: str = field(default="", compare=False)

    def __str__(self) -> str:
        return self.name or f"tr({linalg.format_matrix(self.effect)} rho)"


@dataclass(frozen=True)
class POneMinus:
    p: ProbTerm

    def __str__(self) -> str:
        return f"(1 - {self.p})"


@dataclass(frozen=True)
class PMul:
    left: ProbTerm
    right: ProbTerm

    def __str__(self) -> str:
        return f"{self.left} * {self.right}"


@dataclass(frozen=True)
class PDiv:
    num: ProbTerm
    den: ProbTerm

    def __str__(self) -> str:
        return f"({self.num}) / ({self.den})"


ProbTerm = Union[PConst, PTrace, POneMinus, PMul, PDiv]

P_ONE = PConst(RealField(1))
P_ZERO = PConst(RealField(0))


def ptrace(w: Matrix, name: str = "") -> ProbTerm:
    if linalg.is_identity(w):
        return P_ONE
    if all(x.is_zero() for row in w for x in row):
        return P_ZERO
    return PTrace(w, name)


def one_minus(p: ProbTerm) -> ProbTerm:
    if isinstance(p, PConst):
        return PConst(1 - p.value)
    if isinstance(p, POneMinus):
        return p.p
    return POneMinus(p)


def pmul(a: ProbTerm, b: ProbTerm) -> ProbTerm:
    if isinstance(a, PConst) and isinstance(b, PConst):
        return PConst(a.value * b.value)
    if a == P_ONE:
        return b
    if b == P_ONE:
        return a
    return PMul(a, b)


def pdiv(a: ProbTerm, b: ProbTerm) -> ProbTerm:
    if b == P_ONE:
        return a
    if isinstance(a, PDiv) and isinstance(b, PDiv) and a.den == b.den:
        return pdiv(a.num, b.num)
    return PDiv(a, b)


def prob(k: int, qubit: int, m: int, label: str) -> ProbTerm:
    """p_{k,i}: the chance of outcome ``k`` when measuring ``qubit``."""
    return PTrace(projector(k, qubit, m), f"p{k}({label})")


def compose_prob(p: ProbTerm, psi: QuantumMap) -> ProbTerm:
    """``p o psi``."""
    if isinstance(p, PConst):
        return p
    if isinstance(p, PTrace):
        name = f"{p.name} o {psi.name}" if p.name else ""
        return pdiv(ptrace(pullback(p.effect, psi), name), ptrace(psi.effect))
    if isinstance(p, POneMinus):
        return one_minus(compose_prob(p.p, psi))
    if isinstance(p, PMul):
        return pmul(compose_prob(p.left, psi), compose_prob(p.right, psi))
    if isinstance(p, PDiv):
        return pdiv(compose_prob(p.num, psi), compose_prob(p.den, psi))
    raise TypeError(p)


# ------------------------------------------------------------------ expectation terms


@dataclass(frozen=True)
class EVar:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Subst:
    """``term[update]``: evaluate ``term`` in the updated state."""

    term: ETerm
    update: Update


@dataclass(frozen=True)
class Bary:
    """``left +_p right`` = p * left + (1 - p) * right."""

    left: ETerm
    p: ProbTerm
    right: ETerm


@dataclass(frozen=True)
class Scale:
    p: ProbTerm
    term: ETerm


@dataclass(frozen=True)
class Sum:
    left: ETerm
    right: ETerm


ETerm = Union[EVar, Subst, Bary, Scale, Sum]


def label_var(label: int) -> EVar:
    return EVar(f"X_{label}")


def format_eterm(t: ETerm) -> str:
    if isinstance(t, EVar):
        return t.name
    if isinstance(t, Subst):
        return f"{format_eterm(t.term)}[{t.update}]"
    if isinstance(t, Bary):
        return f"({format_eterm(t.left)} +{{{t.p}}} {format_eterm(t.right)})"
    if isinstance(t, Scale):
        return f"{t.p} * {format_eterm(t.term)}"
    if isinstance(t, Sum):
        return f"({format_eterm(t.left)} + {format_eterm(t.right)})"
    raise TypeError(t)


def evars(t: ETerm) -> set[str]:
    if isinstance(t, EVar):
        return {t.name}
    if isinstance(t, Subst):
        return evars(t.term)
    if isinstance(t, Scale):
        return evars(t.term)
    if isinstance(t, (Bary, Sum)):
        return evars(t.left) | evars(t.right)
    raise TypeError(t)


def subst_chain(t: ETerm) -> tuple[EVar, list[Update]] | None:
    """Split ``X[u1][u2]...`` into ``X`` and its updates (innermost first)."""
    ups: list[Update] = []
    while isinstance(t, Subst):
        ups.append(t.update)
        t = t.term
    if not isinstance(t, EVar):
        return None
    ups.reverse()
    return t, ups


def apply_updates(t: ETerm, updates: list[Update]) -> ETerm:
    for u in updates:
        t = Subst(t, u)
    return t


def format_prob(p: ProbTerm) -> str:
    return str(p)


__all__ = [
    "Bary", "ClassicalAssign", "ETerm", "EVar", "PConst", "PDiv", "PMul", "POneMinus", "PTrace",
    "P_ONE", "P_ZERO", "ProbTerm", "QuantumMap", "Scale", "Subst", "Sum", "Update",
    "apply_updates", "compose_prob", "evars", "format_eterm", "format_prob", "gate_map",
    "identity_map", "label_var", "measurement_map", "one_minus", "pdiv", "pmul", "prob",
    "ptrace", "pullback", "reset_map", "subst_chain",
]
