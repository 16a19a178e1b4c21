"""Multivariate polynomials with Q(sqrt2) coefficients, and their text form.

State variables are named ``Y_<var>`` (classical), ``A_<j>_<k>`` and
``B_<j>_<k>`` (real and imaginary part of density entry (j, k), 1-based).
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

from ..algebraic import RealField, format_real
from ..semantics import DensityMatrix, Store
from ..syntax import Program

Monomial = tuple[tuple[str, int], ...]

R0 = RealField(0)
R1 = RealField(1)

_AB = re.compile(r"([AB])_(\d+)_(\d+)$")


@lru_cache(maxsize=None)
def var_key(name: str) -> tuple:
    """Canonical variable order: classical, A block, B block, auxiliaries, unknowns."""
    m = _AB.match(name)
    if m:
        return (1 if m.group(1) == "A" else 2, int(m.group(2)), int(m.group(3)), "")
    if name.startswith("Y_"):
        return (0, 0, 0, name)
    if name.startswith("Z_") and name[2:].isdigit():
        return (3, int(name[2:]), 0, "")
    return (4, 0, 0, name)


def is_state_var(name: str) -> bool:
    return name.startswith("Y_") or _AB.match(name) is not None


def is_matrix_var(name: str) -> bool:
    return _AB.match(name) is not None


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items(), key=lambda ve: var_key(ve[0])))


def mono_degree(m: Monomial, only_matrix: bool = False) -> int:
    return sum(e for v, e in m if not only_matrix or is_matrix_var(v))


def grlex_key(m: Monomial) -> tuple:
    return (mono_degree(m), tuple((var_key(v), -e) for v, e in m))


class Poly:
    """Sparse polynomial: monomial -> non-zero coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, RealField] | None = None) -> None:
        self.terms: dict[Monomial, RealField] = {k: v for k, v in (terms or {}).items() if not v.is_zero()}

    # construction

    @classmethod
    def const(cls, c: object) -> Poly:
        return cls({(): RealField.coerce(c)})  # type: ignore[arg-type]

    @classmethod
    def var(cls, name: str) -> Poly:
        return cls({((name, 1),): R1})

    @staticmethod
    def coerce(x: object) -> Poly:
        return x if isinstance(x, Poly) else Poly.const(x)

    # arithmetic

    def __add__(self, other: object) -> Poly:
        o = Poly.coerce(other)
        out = dict(self.terms)
        for k, v in o.terms.items():
            out[k] = out[k] + v if k in out else v
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: object) -> Poly:
        return self + (-Poly.coerce(other))

    def __rsub__(self, other: object) -> Poly:
        return Poly.coerce(other) - self

    def __mul__(self, other: object) -> Poly:
        o = Poly.coerce(other)
        if not self.terms or not o.terms:
            return Poly()
        if len(o.terms) == 1 and () in o.terms:
            c = o.terms[()]
            return Poly({k: v * c for k, v in self.terms.items()})
        if len(self.terms) == 1 and () in self.terms:
            return o * self
        out: dict[Monomial, RealField] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in o.terms.items():
                k = _mono_mul(k1, k2)
                v = v1 * v2
                out[k] = out[k] + v if k in out else v
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out, base = Poly.const(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # inspection

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction, RealField)):
            return self == Poly.const(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(k == () for k in self.terms)

    def const_value(self) -> RealField:
        if not self.is_const():
            raise ValueError("polynomial is not constant")
        return self.terms.get((), R0)

    def degree(self, only_matrix: bool = False) -> int:
        return max((mono_degree(k, only_matrix) for k in self.terms), default=0)

    def variables(self) -> list[str]:
        vs = {v for k in self.terms for v, _ in k}
        return sorted(vs, key=var_key)

    def sorted_terms(self) -> list[tuple[Monomial, RealField]]:
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]))

    # evaluation and substitution

    def evaluate(self, env: Mapping[str, RealField]) -> RealField:
        acc = R0
        for k, c in self.terms.items():
            v = c
            for name, e in k:
                v = v * (env[name] ** e if e != 1 else env[name])
            acc = acc + v
        return acc

    def at_state(self, store: Store, rho: DensityMatrix) -> RealField:
        return self.evaluate(StateEnv(store, rho))

    __call__ = at_state

    def substitute(self, images: Mapping[str, Poly]) -> Poly:
        """Simultaneously replace variables by polynomials."""
        if not images:
            return self
        acc: dict[Monomial, RealField] = {}
        powers: dict[tuple[str, int], Poly] = {}
        for k, c in self.terms.items():
            keep: list[tuple[str, int]] = []
            term = Poly({(): c})
            for v, e in k:
                img = images.get(v)
                if img is None:
                    keep.append((v, e))
                    continue
                pw = powers.get((v, e))
                if pw is None:
                    pw = powers[(v, e)] = img ** e
                term = term * pw
            if keep:
                term = term * Poly({tuple(keep): R1})
            for kk, vv in term.terms.items():
                acc[kk] = acc[kk] + vv if kk in acc else vv
        return Poly(acc)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)


class StateEnv(Mapping[str, RealField]):
    """Lazy valuation of state variables at a concrete state."""

    def __init__(self, store: Store, rho: DensityMatrix) -> None:
        self.store = store
        self.rho = rho
        self.cache: dict[str, RealField] = {}

    def __getitem__(self, name: str) -> RealField:
        v = self.cache.get(name)
        if v is not None:
            return v
        if name.startswith("Y_"):
            v = RealField(self.store[name[2:]])
        else:
            m = _AB.match(name)
            if m is None:
                raise KeyError(name)
            x = self.rho[int(m.group(2)) - 1, int(m.group(3)) - 1]
            v = x.real_part() if m.group(1) == "A" else x.imag_part()
        self.cache[name] = v
        return v

    def __iter__(self):
        return iter(self.cache)

    def __len__(self) -> int:
        return len(self.cache)


# ------------------------------------------------------------------ variables of a program


def classical_symbols(program: Program) -> list[str]:
    return [f"Y_{v}" for v in program.classical_vars]


def matrix_symbols(m: int) -> list[str]:
    n = 2 ** m
    return [f"{ab}_{j}_{k}" for ab in "AB" for j in range(1, n + 1) for k in range(1, n + 1)]


def state_symbols(program: Program) -> list[str]:
    return classical_symbols(program) + matrix_symbols(program.num_qubits)


def monomials(variables: Sequence[str], degree: int) -> list[Monomial]:
    """All monomials of total degree at most ``degree``, in graded order."""
    out: list[Monomial] = []
    for d in range(degree + 1):
        for combo in combinations_with_replacement(variables, d):
            counts: dict[str, int] = {}
            for v in combo:
                counts[v] = counts.get(v, 0) + 1
            out.append(tuple(sorted(counts.items(), key=lambda ve: var_key(ve[0]))))
    return out


# ------------------------------------------------------------------ text form


def format_monomial(m: Monomial) -> str:
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)


def _format_coeff(c: RealField) -> str:
    text = format_real(c)
    return text if c.b == 0 or c.a == 0 else f"({text})"


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    parts: list[str] = []
    for k, c in sorted(p.terms.items(), key=lambda kv: grlex_key(kv[0])):
        neg = c.sign() < 0 if c.b == 0 or c.a == 0 else False
        mag = -c if neg else c
        if not k:
            body = _format_coeff(mag)
        elif mag == R1:
            body = format_monomial(k)
        else:
            body = f"{_format_coeff(mag)}*{format_monomial(k)}"
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(parts)


class PolyParseError(ValueError):
    pass


_PTOK = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>\*\*|[-+*/^()\[\],]))"
)


class _PolyParser:
    def __init__(self, text: str, program: Program | None) -> None:
        self.text = text
        self.program = program
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _PTOK.match(text, pos)
            if m is None or m.end() == pos:
                raise PolyParseError(f"unexpected character {text[pos:].strip()[0]!r} at column {pos + 1}")
            kind = m.lastgroup or ""
            self.toks.append((kind, m.group(kind), m.start(kind) + 1))
            pos = m.end()
        self.i = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def accept(self, text: str) -> bool:
        t = self.peek()
        if t is not None and t[0] == "op" and t[1] == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            t = self.peek()
            where = f"column {t[2]}" if t else "end of input"
            raise PolyParseError(f"expected {text!r} at {where}")

    def parse(self) -> Poly:
        p = self.expr()
        t = self.peek()
        if t is not None:
            raise PolyParseError(f"unexpected {t[1]!r} at column {t[2]}")
        return p

    def expr(self) -> Poly:
        if self.accept("-"):
            p = -self.term()
        else:
            self.accept("+")
            p = self.term()
        while True:
            if self.accept("+"):
                p = p + self.term()
            elif self.accept("-"):
                p = p - self.term()
            else:
                return p

    def term(self) -> Poly:
        p = self.factor()
        while True:
            if self.accept("*"):
                p = p * self.factor()
            elif self.accept("/"):
                d = self.factor()
                if not d.is_const() or d.const_value().is_zero():
                    raise PolyParseError("division is only allowed by non-zero constants")
                p = p * Poly.const(d.const_value().inverse())
            else:
                return p

    def factor(self) -> Poly:
        base = self.unary()
        if self.accept("^") or self.accept("**"):
            t = self.peek()
            if t is None or t[0] != "num" or "." in t[1]:
                raise PolyParseError("exponent must be a non-negative integer")
            self.i += 1
            return base ** int(t[1])
        return base

    def unary(self) -> Poly:
        if self.accept("-"):
            return -self.unary()
        return self.atom()

    def atom(self) -> Poly:
        t = self.peek()
        if t is None:
            raise PolyParseError("unexpected end of input")
        kind, text, col = t
        self.i += 1
        if kind == "num":
            return Poly.const(Fraction(text))
        if kind == "op" and text == "(":
            p = self.expr()
            self.expect(")")
            return p
        if kind == "name":
            if text == "sqrt2":
                return Poly.const(RealField(0, 1))
            if text == "var":
                self.expect("(")
                t2 = self.peek()
                if t2 is None or t2[0] != "name":
                    raise PolyParseError(f"expected a variable name after var( at column {col}")
                self.i += 1
                self.expect(")")
                return self.classical(t2[1], t2[2])
            if text in ("A", "B") and self.accept("["):
                j = self.index()
                self.expect("]")
                self.expect("[")
                k = self.index()
                self.expect("]")
                return self.matrix(text, j, k, col)
            m = _AB.match(text)
            if m:
                return self.matrix(m.group(1), int(m.group(2)), int(m.group(3)), col)
            if text.startswith("Y_"):
                return self.classical(text[2:], col)
            return self.classical(text, col)
        raise PolyParseError(f"unexpected {text!r} at column {col}")

    def index(self) -> int:
        t = self.peek()
        if t is None or t[0] != "num" or "." in t[1]:
            raise PolyParseError("matrix index must be a positive integer")
        self.i += 1
        return int(t[1])

    def classical(self, name: str, col: int) -> Poly:
        if self.program is not None and name not in self.program.classical_vars:
            raise PolyParseError(f"unknown classical variable {name!r} at column {col}")
        return Poly.var(f"Y_{name}")

    def matrix(self, ab: str, j: int, k: int, col: int) -> Poly:
        if self.program is not None:
            n = 2 ** self.program.num_qubits
            if not (1 <= j <= n and 1 <= k <= n):
                raise PolyParseError(f"matrix index ({j}, {k}) out of range 1..{n} at column {col}")
        return Poly.var(f"{ab}_{j}_{k}")


def parse_poly(text: str, program: Program | None = None) -> Poly:
    """Parse the template language: rationals, sqrt2, variables, ``A[j][k]``, ``+ - * /`` and powers."""
    return _PolyParser(text, program).parse()


def parse_assignment(text: str, program: Program | None = None) -> dict[str, Poly]:
    """Lines of the form ``X_<label> := <polynomial>``; ``#`` starts a comment."""
    out: dict[str, Poly] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, rhs = line.partition(":=")
        name = name.strip()
        if not sep or not re.fullmatch(r"X(_\d+)?", name):
            raise PolyParseError(f"line {lineno}: expected 'X_<label> := <polynomial>'")
        if name in out:
            raise PolyParseError(f"line {lineno}: {name} assigned twice")
        try:
            out[name] = parse_poly(rhs, program)
        except PolyParseError as e:
            raise PolyParseError(f"line {lineno}: {e}") from None
    return out


def format_assignment(alpha: Mapping[str, Poly]) -> str:
    def key(name: str) -> tuple[int, int]:
        return (0, int(name[2:])) if name.startswith("X_") else (1, 0)

    return "".join(f"{k} := {format_poly(alpha[k])}\n" for k in sorted(alpha, key=key))


def iter_state_vars(polys: Iterable[Poly]) -> list[str]:
    vs = {v for p in polys for v in p.variables() if is_state_var(v)}
    return sorted(vs, key=var_key)
