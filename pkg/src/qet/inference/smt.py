"""SMT-LIB2 export: fixed-assignment checking (QF_NRA) and template synthesis (NRA)."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from ..algebraic import RealField
from ..expectations import Constraint, evars, infer_program
from ..syntax import Program
from .encode import Admissibility, Atom, AuxDef, EncodedConstraint, admissibility, encode_all
from .polynomial import Monomial, Poly, monomials, state_symbols, var_key


def _rational(q: Fraction) -> str:
    if q < 0:
        return f"(- {_rational(-q)})"
    if q.denominator == 1:
        return f"{q.numerator}.0"
    return f"(/ {q.numerator}.0 {q.denominator}.0)"


def smt_real(c: RealField) -> str:
    """``a + b*sqrt2`` with the symbol ``sqrt2``."""
    a, b = Fraction(c.a), Fraction(c.b)
    if b == 0:
        return _rational(a)
    tail = "sqrt2" if b == 1 else f"(* {_rational(b)} sqrt2)"
    return tail if a == 0 else f"(+ {_rational(a)} {tail})"


def _monomial(m: Monomial) -> list[str]:
    return [v for v, e in m for _ in range(e)]


def smt_poly(p: Poly) -> str:
    if p.is_zero():
        return "0.0"
    parts = []
    for m, c in p.sorted_terms():
        factors = _monomial(m)
        if c != RealField(1) or not factors:
            factors = [smt_real(c)] + factors
        parts.append(factors[0] if len(factors) == 1 else f"(* {' '.join(factors)})")
    return parts[0] if len(parts) == 1 else f"(+ {' '.join(parts)})"


_REL = {">=": ">=", ">": ">", "=": "="}


def smt_atom(a: Atom) -> str:
    return f"({_REL[a.rel]} {smt_poly(a.poly)} 0.0)"


def smt_aux(d: AuxDef) -> str:
    a, b = smt_poly(d.a), smt_poly(d.b)
    if d.kind == "monus":
        body = f"(ite (> {a} {b}) (- {a} {b}) 0.0)"
    elif d.kind == "eq":
        body = f"(ite (= {a} {b}) 1.0 0.0)"
    else:
        body = f"(ite (< {a} {b}) 1.0 0.0)"
    return f"(= {d.name} {body})"


def _conj(items: list[str]) -> str:
    if not items:
        return "true"
    return items[0] if len(items) == 1 else f"(and {' '.join(items)})"


def smt_constraint(e: EncodedConstraint) -> str:
    premise = _conj([smt_atom(a) for a in e.guard + e.side])
    return f"(=> {premise} (<= {smt_poly(e.lhs)} {smt_poly(e.rhs)}))"


def _header(program: Program, adm: Admissibility, logic: str, title: str) -> list[str]:
    lines = [
        f"; {title}",
        f"; classical variables: {', '.join(program.classical_vars) or '(none)'}; qubits: {program.num_qubits}",
        "; Y_<v>: classical value, A_j_k / B_j_k: real / imaginary part of density entry (j, k)",
        "; nat variables range over non-negative reals (integrality is not asserted)",
    ]
    if not adm.psd_exact:
        lines.append(
            "; CAVEAT: positivity is relaxed to non-negative diagonal entries; "
            "an unsat answer is sound only over this larger region"
        )
    lines.append(f"(set-logic {logic})")
    return lines


def _label_key(name: str) -> tuple[int, int]:
    return (0, int(name[2:])) if name.startswith("X_") else (1, 0)


def _constraint_vars(constraints: list[Constraint], post: str) -> list[str]:
    names = {post}
    for c in constraints:
        names |= evars(c.lhs) | {c.rhs.name}
    return sorted(names, key=_label_key)


def _aux_names(encoded: list[EncodedConstraint]) -> list[str]:
    return [d.name for e in encoded for d in e.aux]


def export_smt_check(program: Program, f: Poly, alpha: Mapping[str, Poly]) -> str:
    """Satisfiable iff some admissible state violates a constraint or makes a template negative."""
    full = dict(alpha)
    full["X"] = f
    _, constraints = infer_program(program, "X")
    names = _constraint_vars(constraints, "X")
    missing = [n for n in names if n not in full]
    if missing:
        raise KeyError(f"assignment has no polynomial for {', '.join(missing)}")
    encoded = encode_all(constraints, full, program.num_qubits)
    adm = admissibility(program)
    out = _header(program, adm, "QF_NRA", "refutation query for a fixed assignment: unsat certifies it")
    for n in names:
        out.append(f"; {n} := {full[n]}")
    for v in state_symbols(program):
        out.append(f"(declare-fun {v} () Real)")
    out.append("(declare-fun sqrt2 () Real)")
    for z in _aux_names(encoded):
        out.append(f"(declare-fun {z} () Real)")
    out.append("(assert (= (* sqrt2 sqrt2) 2.0))")
    out.append("(assert (> sqrt2 0.0))")
    for a in adm.atoms:
        out.append(f"(assert {smt_atom(a)})")
    for e in encoded:
        for d in e.aux:
            out.append(f"(assert {smt_aux(d)})")
    goals = [smt_constraint(e) for e in encoded]
    goals += [f"(>= {smt_poly(full[n])} 0.0)" for n in names]
    out.append("(assert (not (and")
    out.extend(f"  {g}" for g in goals)
    out.append(")))")
    out.append("(check-sat)")
    return "\n".join(out) + "\n"


def coefficient_name(var: str, index: int) -> str:
    return f"c_{var}_t{index}"


def template(program: Program, var: str, degree: int) -> tuple[Poly, list[tuple[str, Monomial]]]:
    """``sum_t c_t * t`` over all monomials of total degree at most ``degree``."""
    monos = monomials(state_symbols(program), degree)
    coeffs = [(coefficient_name(var, i), m) for i, m in enumerate(monos)]
    acc: dict[Monomial, RealField] = {}
    for name, m in coeffs:
        key = tuple(sorted(m + ((name, 1),), key=lambda ve: var_key(ve[0])))
        acc[key] = RealField(1)
    return Poly(acc), coeffs


def export_smt_synthesis(program: Program, f: Poly, degree: int) -> str:
    """``exists c. forall state. admissible => constraints and templates >= 0``, with ``P_X = f``."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if f.degree() > degree:
        raise ValueError(f"post-expectation has degree {f.degree()} above the template degree {degree}")
    _, constraints = infer_program(program, "X")
    names = _constraint_vars(constraints, "X")
    templates: dict[str, Poly] = {}
    coeffs: dict[str, list[tuple[str, Monomial]]] = {}
    for n in names:
        templates[n], coeffs[n] = template(program, n, degree)
    encoded = encode_all(constraints, templates, program.num_qubits)
    adm = admissibility(program)
    out = _header(program, adm, "NRA", "template synthesis: a model fixes every coefficient c_<X>_t<n>")
    n_mono = len(coeffs[names[0]])
    out.append(f"; {n_mono} coefficients per expectation variable, monomials in graded order:")
    for i, (_, m) in enumerate(coeffs[names[0]]):
        out.append(f";   t{i} = {' * '.join(_monomial(m)) or '1'}")
    out.append("(declare-fun sqrt2 () Real)")
    for n in names:
        for c, _ in coeffs[n]:
            out.append(f"(declare-fun {c} () Real)")
    out.append("(assert (= (* sqrt2 sqrt2) 2.0))")
    out.append("(assert (> sqrt2 0.0))")
    pinned = {m: c for m, c in f.terms.items()}
    for c, m in coeffs["X"]:
        out.append(f"(assert (= {c} {smt_real(pinned.get(m, RealField(0)))}))")
    bound = state_symbols(program) + _aux_names(encoded)
    out.append(f"(assert (forall ({' '.join(f'({v} Real)' for v in bound)})")
    premise = [smt_atom(a) for a in adm.atoms]
    for e in encoded:
        premise += [smt_aux(d) for d in e.aux]
    out.append(f"  (=> {_conj(premise)}")
    body = [smt_constraint(e) for e in encoded]
    body += [f"(>= {smt_poly(templates[n])} 0.0)" for n in names]
    out.append("    (and")
    out.extend(f"      {b}" for b in body)
    out.append("))))")
    out.append("(check-sat)")
    out.append("(get-model)")
    return "\n".join(out) + "\n"


__all__ = [
    "coefficient_name", "export_smt_check", "export_smt_synthesis", "smt_atom", "smt_poly",
    "smt_real", "template",
]
