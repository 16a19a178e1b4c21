"""Compiling guarded constraints into polynomial implications over state variables."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Mapping

from ..algebraic import RealField
from ..expectations import (
    BoolGuard, CommonForm, Constraint, Guard, NormalTerm, ProbNonzero, ProbZero, QuantumMap,
    TracePoly, common_denominator, normalize,
)
from ..linalg import Matrix, is_identity
from ..semantics import DensityMatrix, Store
from ..syntax import BoolLit, Expr, NatLit, Not, Program, Var, projector
from .polynomial import Poly, StateEnv, is_matrix_var, matrix_symbols

R0 = RealField(0)
R1 = RealField(1)

RELATIONS = (">=", ">", "=")


@dataclass(frozen=True)
class Atom:
    """``poly REL 0``."""

    poly: Poly
    rel: str

    def holds(self, env: Mapping[str, RealField]) -> bool:
        s = self.poly.evaluate(env).sign()
        if self.rel == ">=":
            return s >= 0
        if self.rel == ">":
            return s > 0
        if self.rel == "=":
            return s == 0
        raise ValueError(self.rel)


@dataclass(frozen=True)
class AuxDef:
    """A fresh variable standing for a non-polynomial classical operation.

    ``monus``: Z = max(0, a - b); ``eq``: Z = [a = b]; ``lt``: Z = [a < b].
    """

    name: str
    kind: str
    a: Poly
    b: Poly

    def value(self, env: Mapping[str, RealField]) -> RealField:
        d = (self.a - self.b).evaluate(env)
        if self.kind == "monus":
            return d if d.sign() > 0 else R0
        if self.kind == "eq":
            return R1 if d.is_zero() else R0
        if self.kind == "lt":
            return R1 if d.sign() < 0 else R0
        raise ValueError(self.kind)


class Outcome(enum.Enum):
    HOLDS = "Holds"
    VIOLATED = "Violated"
    GUARD_FALSE = "GuardFalse"


@dataclass(frozen=True)
class EncodedConstraint:
    """``guard and side => lhs <= rhs``, with auxiliary definitions.

    ``side`` holds the positivity of every trace that was cleared from a
    denominator; it is implied by the guard on genuine density matrices.
    """

    source: Constraint | None
    guard: tuple[Atom, ...]
    side: tuple[Atom, ...]
    aux: tuple[AuxDef, ...]
    lhs: Poly
    rhs: Poly

    def environment(self, env: Mapping[str, RealField]) -> dict[str, RealField]:
        full = dict(env) if not isinstance(env, StateEnv) else _Chain(env)
        for a in self.aux:
            full[a.name] = a.value(full)
        return full  # type: ignore[return-value]

    def outcome(self, env: Mapping[str, RealField]) -> Outcome:
        full = self.environment(env)
        if not all(a.holds(full) for a in self.guard + self.side):
            return Outcome.GUARD_FALSE
        d = (self.rhs - self.lhs).evaluate(full)
        return Outcome.HOLDS if d.sign() >= 0 else Outcome.VIOLATED

    def at_state(self, store: Store, rho: DensityMatrix) -> Outcome:
        return self.outcome(StateEnv(store, rho))


class _Chain(dict):
    """A dict that falls back to a lazy state valuation."""

    def __init__(self, base: StateEnv) -> None:
        super().__init__()
        self.base = base

    def __missing__(self, key: str) -> RealField:
        return self.base[key]


# ------------------------------------------------------------------ building blocks


def trace_poly(w: Matrix) -> Poly:
    """tr(W rho) as a linear polynomial in the A/B symbols (W hermitian)."""
    out: dict = {}
    n = len(w)
    for j in range(n):
        for k in range(n):
            c = w[k][j]
            if c.is_zero():
                continue
            re, im = c.real_part(), c.imag_part()
            # Re(c * (A + iB)) = re*A - im*B
            if not re.is_zero():
                key = ((f"A_{j + 1}_{k + 1}", 1),)
                out[key] = out.get(key, R0) + re
            if not im.is_zero():
                key = ((f"B_{j + 1}_{k + 1}", 1),)
                out[key] = out.get(key, R0) - im
    return Poly(out)


def map_images(chi: QuantumMap) -> dict[str, Poly]:
    """Real and imaginary parts of (sum_k K rho K^dagger)_{jk} as linear forms."""
    n = chi.dim
    acc: dict[tuple[int, int], dict] = {}
    for kmat in chi.kraus:
        nz = [[(a, x) for a, x in enumerate(row) if not x.is_zero()] for row in kmat]
        for j in range(n):
            for k in range(n):
                slot = acc.setdefault((j, k), {})
                for a, x in nz[j]:
                    for b, y in nz[k]:
                        c = x * y.conj()
                        slot[(a, b)] = slot[(a, b)] + c if (a, b) in slot else c
    images: dict[str, Poly] = {}
    for (j, k), coeffs in acc.items():
        re: dict = {}
        im: dict = {}
        for (a, b), c in coeffs.items():
            cr, ci = c.real_part(), c.imag_part()
            ka, kb = ((f"A_{a + 1}_{b + 1}", 1),), ((f"B_{a + 1}_{b + 1}", 1),)
            # c * (A + iB) = (cr A - ci B) + i (cr B + ci A)
            for d, key, v in ((re, ka, cr), (re, kb, -ci), (im, kb, cr), (im, ka, ci)):
                if not v.is_zero():
                    d[key] = d.get(key, R0) + v
        images[f"A_{j + 1}_{k + 1}"] = Poly(re)
        images[f"B_{j + 1}_{k + 1}"] = Poly(im)
    for name in matrix_symbols(n.bit_length() - 1):
        images.setdefault(name, Poly())
    return images


def trace_poly_of(q: TracePoly) -> Poly:
    out = Poly()
    for atoms, c in q.terms.items():
        t = Poly.const(c)
        for a in atoms:
            t = t * trace_poly(a.effect)
        out = out + t
    return out


class ExprEncoder:
    """Encodes classical expressions; allocates auxiliaries for monus and comparisons."""

    def __init__(self, start: int = 0) -> None:
        self.aux: list[AuxDef] = []
        self.start = start

    def fresh(self, kind: str, a: Poly, b: Poly) -> Poly:
        for d in self.aux:
            if d.kind == kind and d.a == a and d.b == b:
                return Poly.var(d.name)
        name = f"Z_{self.start + len(self.aux)}"
        self.aux.append(AuxDef(name, kind, a, b))
        return Poly.var(name)

    def encode(self, e: Expr, env: Mapping[str, Poly] | None = None) -> Poly:
        if isinstance(e, Var):
            return env[e.name] if env and e.name in env else Poly.var(f"Y_{e.name}")
        if isinstance(e, NatLit):
            return Poly.const(e.value)
        if isinstance(e, BoolLit):
            return Poly.const(1 if e.value else 0)
        if isinstance(e, Not):
            return 1 - self.encode(e.operand, env)
        a = self.encode(e.left, env)
        b = self.encode(e.right, env)
        if e.op == "+":
            return a + b
        if e.op == "*":
            return a * b
        if e.op == "and":
            return a * b
        if e.op == "or":
            return a + b - a * b
        if e.op == "-":
            if b.is_const() and a.is_const():
                d = a.const_value() - b.const_value()
                return Poly.const(d if d.sign() > 0 else 0)
            return self.fresh("monus", a, b)
        if e.op == "=":
            return self.fresh("eq", a, b)
        if e.op == "<":
            return self.fresh("lt", a, b)
        raise ValueError(e.op)


# ------------------------------------------------------------------ constraints


def _classical_images(t: NormalTerm, enc: ExprEncoder) -> dict[str, Poly]:
    """Compose the chain into one parallel update (outermost assignment runs first)."""
    env: dict[str, Poly] = {}
    for c in reversed(t.chain):
        env[c.var] = enc.encode(c.expr, env)
    return {f"Y_{v}": p for v, p in env.items()}


def instantiate(template: Poly, t: NormalTerm, enc: ExprEncoder) -> tuple[Poly, Poly, int]:
    """``template[chain][chi]`` as ``numerator / D^e``; returns (numerator, D, e)."""
    images = _classical_images(t, enc)
    d_poly = Poly.const(1)
    e = 0
    if t.qmap is not None:
        images.update(map_images(t.qmap))
        if not is_identity(t.qmap.effect):
            d_poly = trace_poly(t.qmap.effect)
            e = template.degree(only_matrix=True)
    if e == 0:
        return template.substitute(images), d_poly, 0
    # homogenise monomial by monomial so the quotient becomes a polynomial
    out = Poly()
    pw = {i: d_poly ** i for i in range(e + 1)}
    for mono, c in template.terms.items():
        deg = sum(x for v, x in mono if is_matrix_var(v))
        part = Poly({mono: c}).substitute(images)
        out = out + part * pw[e - deg]
    return out, d_poly, e


def encode_guard(g: Guard, m: int, enc: ExprEncoder) -> tuple[Atom, ...]:
    if isinstance(g, BoolGuard):
        return (Atom(enc.encode(g.expr) - 1, ">="),)
    if isinstance(g, ProbZero):
        return (Atom(trace_poly(projector(g.k, g.qubit, m)), "="),)
    if isinstance(g, ProbNonzero):
        # traces of PSD operators are non-negative, so "not zero" is "positive"
        return tuple(Atom(trace_poly(projector(k, g.qubit, m)), ">") for k in (0, 1))
    raise TypeError(f"unsupported guard {g!r}")


def encode_constraint(
    c: Constraint, templates: Mapping[str, Poly], num_qubits: int, *, aux_start: int = 0
) -> EncodedConstraint:
    """``guard => sum_i Q_i * P_i[...] <= Q * P_label``, all fractions cleared."""
    enc = ExprEncoder(aux_start)
    guard = encode_guard(c.guard, num_qubits, enc)
    cf: CommonForm = common_denominator(normalize(c.lhs))
    parts = []
    dens: list[tuple[Poly, int]] = []  # distinct denominators with their largest exponent
    for q, t in zip(cf.numerators, cf.terms):
        if t.var.name not in templates:
            raise KeyError(f"no polynomial for {t.var.name}")
        num, d, e = instantiate(templates[t.var.name], t, enc)
        parts.append((trace_poly_of(q), num, d, e))
        if e:
            for i, (dd, ee) in enumerate(dens):
                if dd == d:
                    dens[i] = (dd, max(ee, e))
                    break
            else:
                dens.append((d, e))
    mult = Poly.const(1)
    for d, e in dens:
        mult = mult * d ** e
    lhs = Poly()
    for qi, num, d, e in parts:
        factor = Poly.const(1)
        for dd, ee in dens:
            factor = factor * dd ** (ee - e if dd == d else ee)
        lhs = lhs + qi * num * factor
    q_poly = trace_poly_of(cf.denominator)
    rhs = q_poly * templates[c.rhs.name] * mult
    side: list[Atom] = []
    candidates = ([Atom(q_poly, ">")] if not q_poly.is_const() else []) + [Atom(d, ">") for d, _ in dens]
    for a in candidates:
        if a not in guard and a not in side:
            side.append(a)
    return EncodedConstraint(c, guard, tuple(side), tuple(enc.aux), lhs, rhs)


def encode_all(
    constraints: list[Constraint], templates: Mapping[str, Poly], num_qubits: int
) -> list[EncodedConstraint]:
    out = []
    start = 0
    for c in constraints:
        ec = encode_constraint(c, templates, num_qubits, aux_start=start)
        start += len(ec.aux)
        out.append(ec)
    return out


# ------------------------------------------------------------------ admissibility


def _complex_entry(j: int, k: int) -> tuple[Poly, Poly]:
    return Poly.var(f"A_{j + 1}_{k + 1}"), Poly.var(f"B_{j + 1}_{k + 1}")


def _cmul(x: tuple[Poly, Poly], y: tuple[Poly, Poly]) -> tuple[Poly, Poly]:
    return x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0]


def _perm_sign(p: tuple[int, ...]) -> int:
    s = 1
    seen = list(p)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            s = -s
    return s


def minor_poly(idx: tuple[int, ...]) -> Poly:
    """Real part of the principal minor on rows/columns ``idx``, with hermitian symmetry applied."""
    total_re = Poly()
    k = len(idx)
    for perm in permutations(range(k)):
        term = (Poly.const(_perm_sign(perm)), Poly())
        for r in range(k):
            a, b = idx[r], idx[perm[r]]
            term = _cmul(term, _hermitian_entry(a, b))
        total_re = total_re + term[0]
    return total_re


def _hermitian_entry(a: int, b: int) -> tuple[Poly, Poly]:
    """Entry (a, b) written through the upper triangle, so symmetry is built in."""
    if a == b:
        return Poly.var(f"A_{a + 1}_{a + 1}"), Poly()
    if a < b:
        return _complex_entry(a, b)
    re, im = _complex_entry(b, a)
    return re, -im


PSD_QUBIT_LIMIT = 2


@dataclass
class Admissibility:
    atoms: list[Atom] = field(default_factory=list)
    psd_exact: bool = True

    def holds(self, env: Mapping[str, RealField]) -> bool:
        return all(a.holds(env) for a in self.atoms)


def admissibility(program: Program) -> Admissibility:
    """Polynomial side conditions describing genuine stores and density matrices."""
    m = program.num_qubits
    n = 2 ** m
    atoms: list[Atom] = []
    for v in program.bool_vars:
        y = Poly.var(f"Y_{v}")
        atoms.append(Atom(y * (y - 1), "="))
    for v in program.nat_vars:
        atoms.append(Atom(Poly.var(f"Y_{v}"), ">="))
    tr_a = Poly()
    tr_b = Poly()
    for i in range(n):
        a, b = _complex_entry(i, i)
        tr_a, tr_b = tr_a + a, tr_b + b
    atoms.append(Atom(tr_a - 1, "="))
    atoms.append(Atom(tr_b, "="))
    for j in range(n):
        for k in range(j, n):
            aj, bj = _complex_entry(j, k)
            ak, bk = _complex_entry(k, j)
            if j != k:
                atoms.append(Atom(aj - ak, "="))
            atoms.append(Atom(bj + bk, "="))
    exact = m <= PSD_QUBIT_LIMIT
    if exact:
        for size in range(1, n + 1):
            for idx in combinations(range(n), size):
                atoms.append(Atom(minor_poly(idx), ">="))
    else:
        for i in range(n):
            atoms.append(Atom(Poly.var(f"A_{i + 1}_{i + 1}"), ">="))
    return Admissibility(atoms, exact)
