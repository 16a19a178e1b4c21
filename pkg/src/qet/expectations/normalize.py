"""Rewriting expectation terms into weighted sums and clearing denominators.

The normal form is ``sum_i P_i * X_i[c_1]...[c_n][chi]``: a probability
coefficient, a variable, a chain of classical assignments and at most one
quantum map applied outermost.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable

from .. import linalg
from ..algebraic import RealField
from ..linalg import Matrix
from .terms import (
    P_ONE, Bary, ClassicalAssign, ETerm, EVar, PConst, PDiv, PMul, POneMinus, ProbTerm, PTrace,
    QuantumMap, Scale, Subst, Sum, compose_prob, format_eterm, one_minus, pmul,
)


@dataclass(frozen=True)
class NormalTerm:
    coeff: ProbTerm
    var: EVar
    chain: tuple[ClassicalAssign, ...]  # innermost first
    qmap: QuantumMap | None = None

    def body(self) -> ETerm:
        t: ETerm = self.var
        for c in self.chain:
            t = Subst(t, c)
        if self.qmap is not None:
            t = Subst(t, self.qmap)
        return t

    def to_eterm(self) -> ETerm:
        b = self.body()
        return b if self.coeff == P_ONE else Scale(self.coeff, b)

    def __str__(self) -> str:
        return f"{self.coeff} * {format_eterm(self.body())}"


@dataclass(frozen=True)
class NormalSum:
    terms: tuple[NormalTerm, ...]

    def to_eterm(self) -> ETerm:
        if not self.terms:
            return Scale(PConst(RealField(0)), EVar("X"))
        out = self.terms[0].to_eterm()
        for t in self.terms[1:]:
            out = Sum(out, t.to_eterm())
        return out

    def __str__(self) -> str:
        return " + ".join(str(t) for t in self.terms) or "0"


# ------------------------------------------------------------------ rewrite rules


def rewrite_root(t: ETerm) -> ETerm | None:
    """One rule application at the root, or None when no rule matches."""
    if isinstance(t, Subst):
        inner, u = t.term, t.update
        classical = isinstance(u, ClassicalAssign)
        if isinstance(inner, Bary):
            p = inner.p if classical else compose_prob(inner.p, u)  # type: ignore[arg-type]
            return Bary(Subst(inner.left, u), p, Subst(inner.right, u))
        if isinstance(inner, Scale):
            p = inner.p if classical else compose_prob(inner.p, u)  # type: ignore[arg-type]
            return Scale(p, Subst(inner.term, u))
        if isinstance(inner, Sum):
            return Sum(Subst(inner.left, u), Subst(inner.right, u))
        if isinstance(inner, Subst) and isinstance(inner.update, QuantumMap):
            if classical:
                # classical and quantum updates commute
                return Subst(Subst(inner.term, u), inner.update)
            return Subst(inner.term, inner.update.compose(u))  # type: ignore[arg-type]
        return None
    if isinstance(t, Bary):
        return Sum(Scale(t.p, t.left), Scale(one_minus(t.p), t.right))
    if isinstance(t, Scale):
        if isinstance(t.term, Scale):
            return Scale(pmul(t.p, t.term.p), t.term.term)
        if isinstance(t.term, Sum):
            return Sum(Scale(t.p, t.term.left), Scale(t.p, t.term.right))
    return None


def _map_children(t: ETerm, f: Callable[[ETerm], ETerm]) -> ETerm:
    if isinstance(t, Subst):
        return Subst(f(t.term), t.update)
    if isinstance(t, Bary):
        return Bary(f(t.left), t.p, f(t.right))
    if isinstance(t, Scale):
        return Scale(t.p, f(t.term))
    if isinstance(t, Sum):
        return Sum(f(t.left), f(t.right))
    return t


def _innermost(t: ETerm) -> ETerm:
    t = _map_children(t, _innermost)
    r = rewrite_root(t)
    while r is not None:
        t = _map_children(r, _innermost)
        r = rewrite_root(t)
    return t


def _outermost_step(t: ETerm) -> ETerm | None:
    r = rewrite_root(t)
    if r is not None:
        return r
    if isinstance(t, Subst):
        c = _outermost_step(t.term)
        return None if c is None else Subst(c, t.update)
    if isinstance(t, Scale):
        c = _outermost_step(t.term)
        return None if c is None else Scale(t.p, c)
    if isinstance(t, (Bary, Sum)):
        c = _outermost_step(t.left)
        if c is not None:
            return Bary(c, t.p, t.right) if isinstance(t, Bary) else Sum(c, t.right)
        c = _outermost_step(t.right)
        if c is not None:
            return Bary(t.left, t.p, c) if isinstance(t, Bary) else Sum(t.left, c)
    return None


def _outermost(t: ETerm) -> ETerm:
    while True:
        r = _outermost_step(t)
        if r is None:
            return t
        t = r


STRATEGIES = {"innermost": _innermost, "outermost": _outermost}


def rewrite(t: ETerm, strategy: str = "innermost") -> ETerm:
    return STRATEGIES[strategy](t)


def _leaf(t: ETerm, coeff: ProbTerm) -> NormalTerm:
    if isinstance(t, Scale):
        return _leaf(t.term, pmul(coeff, t.p))
    qmap = None
    if isinstance(t, Subst) and isinstance(t.update, QuantumMap):
        qmap, t = t.update, t.term
    chain: list[ClassicalAssign] = []
    while isinstance(t, Subst):
        if not isinstance(t.update, ClassicalAssign):
            raise AssertionError("term is not in normal form")
        chain.append(t.update)
        t = t.term
    if not isinstance(t, EVar):
        raise AssertionError("term is not in normal form")
    chain.reverse()
    return NormalTerm(coeff, t, tuple(chain), qmap)


def _summands(t: ETerm) -> Iterable[ETerm]:
    if isinstance(t, Sum):
        yield from _summands(t.left)
        yield from _summands(t.right)
    else:
        yield t


def normalize(t: ETerm, strategy: str = "innermost") -> NormalSum:
    """Rewrite to ``sum_i P_i * X_i[classical chain][quantum map]``."""
    r = rewrite(t, strategy)
    terms = []
    for s in _summands(r):
        leaf = _leaf(s, P_ONE)
        if isinstance(leaf.coeff, PConst) and leaf.coeff.value.is_zero():
            continue
        terms.append(leaf)
    return NormalSum(tuple(terms))


# ------------------------------------------------------------------ trace polynomials


@lru_cache(maxsize=None)
def _mkey(w: Matrix) -> str:
    return linalg.format_matrix(w)


class TracePoly:
    """Polynomial in trace atoms ``tr(W rho)`` with coefficients in Q(sqrt2)."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[PTrace, ...], RealField] | None = None) -> None:
        self.terms = {k: v for k, v in (terms or {}).items() if not v.is_zero()}

    @classmethod
    def const(cls, c: object) -> TracePoly:
        return cls({(): RealField.coerce(c)})  # type: ignore[arg-type]

    @classmethod
    def atom(cls, p: PTrace) -> TracePoly:
        if linalg.is_identity(p.effect):
            return cls.const(1)
        return cls({(p,): RealField(1)})

    def __add__(self, other: TracePoly) -> TracePoly:
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return TracePoly(out)

    def __neg__(self) -> TracePoly:
        return TracePoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: TracePoly) -> TracePoly:
        return self + (-other)

    def __mul__(self, other: TracePoly) -> TracePoly:
        out: dict[tuple[PTrace, ...], RealField] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(sorted(k1 + k2, key=lambda p: _mkey(p.effect)))
                v = v1 * v2
                out[k] = out[k] + v if k in out else v
        return TracePoly(out)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TracePoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def is_one(self) -> bool:
        return self.terms == {(): RealField(1)}

    def atoms(self) -> list[PTrace]:
        seen: dict[PTrace, None] = {}
        for k in self.terms:
            for a in k:
                seen.setdefault(a, None)
        return list(seen)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, v in self.terms.items():
            factors = [str(a) for a in k]
            if not factors:
                parts.append(str(v))
            elif v == RealField(1):
                parts.append("*".join(factors))
            else:
                parts.append(f"({v})*" + "*".join(factors))
        return " + ".join(parts)


def to_fraction(p: ProbTerm) -> tuple[TracePoly, TracePoly]:
    """``p`` as numerator and denominator trace polynomials."""
    if isinstance(p, PConst):
        return TracePoly.const(p.value), TracePoly.const(1)
    if isinstance(p, PTrace):
        return TracePoly.atom(p), TracePoly.const(1)
    if isinstance(p, POneMinus):
        n, d = to_fraction(p.p)
        return d - n, d
    if isinstance(p, PMul):
        n1, d1 = to_fraction(p.left)
        n2, d2 = to_fraction(p.right)
        return n1 * n2, d1 * d2
    if isinstance(p, PDiv):
        n1, d1 = to_fraction(p.num)
        n2, d2 = to_fraction(p.den)
        if d1 == d2:
            return n1, n2
        return n1 * d2, d1 * n2
    raise TypeError(p)


@dataclass(frozen=True)
class CommonForm:
    """``sum_i Q_i * term_i <= Q * rhs``; each Q is a trace polynomial."""

    numerators: tuple[TracePoly, ...]
    terms: tuple[NormalTerm, ...]  # coefficients of these are ignored
    denominator: TracePoly

    @property
    def rhs_multiplier(self) -> TracePoly:
        return self.denominator

    def __str__(self) -> str:
        lhs = " + ".join(f"({q}) * {format_eterm(t.body())}" for q, t in zip(self.numerators, self.terms))
        return f"{lhs or '0'} <= ({self.denominator}) * rhs"


def common_denominator(ns: NormalSum) -> CommonForm:
    fracs = [to_fraction(t.coeff) for t in ns.terms]
    distinct: list[TracePoly] = []
    for _, d in fracs:
        if not d.is_one() and d not in distinct:
            distinct.append(d)
    q = TracePoly.const(1)
    for d in distinct:
        q = q * d
    nums = []
    for n, d in fracs:
        qi = n
        for other in distinct:
            if other != d:
                qi = qi * other
        nums.append(qi)
    return CommonForm(tuple(nums), ns.terms, q)
