from __future__ import annotations

import os
import random
import shutil
import subprocess
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qet.algebraic import RealField
from qet.expectations import Verdict, ZeroDenominatorError, check_constraint, infer_program
from qet.inference import (
    Atom, NotRefuted, Outcome, Poly, PolyParseError, RefutedAt, StateEnv, admissibility,
    check_assignment, complete_assignment, encode_all, export_smt_check, export_smt_synthesis,
    format_assignment, format_poly, minor_poly, monomials, parse_assignment, parse_poly,
    sample_states, state_symbols, template, trace_poly,
)
from qet.semantics import Configuration, initial_state, preset, run_n
from qet.syntax import Program, Skip, projector

from .conftest import COINTOSS_ASSIGNMENT, PERTURBED_ASSIGNMENT, RUS_ASSIGNMENT, check_golden, load

# ------------------------------------------------------------------ polynomials


@pytest.mark.parametrize(
    "text, shown",
    [
        ("A[1][2] + 2*Y_x^2 - 1/3*sqrt2", "-1/3*sqrt2 + A_1_2 + 2*Y_x^2"),
        ("(Y_i + 1)^2", "1 + 2*Y_i + Y_i^2"),
        ("x*i", "Y_i*Y_x"),  # classical symbols sort by name inside a monomial
        ("B_2_1 - B_2_1", "0"),
    ],
)
def test_parse_and_format_poly(text, shown):
    p = parse_poly(text, load("cointoss"))
    assert format_poly(p) == shown
    assert parse_poly(format_poly(p), load("cointoss")) == p


@pytest.mark.parametrize("text", ["Y_x +", "A_3_1", "X_0", "Y_x / Y_i", "z"])
def test_poly_errors(text):
    with pytest.raises(PolyParseError):
        parse_poly(text, load("cointoss"))


def test_assignment_roundtrip():
    p = load("cointoss")
    alpha = parse_assignment(COINTOSS_ASSIGNMENT, p)
    assert parse_assignment(format_assignment(alpha), p) == alpha
    with pytest.raises(PolyParseError):
        parse_assignment("X_0 := 1\nX_0 := 2", p)
    with pytest.raises(PolyParseError):
        parse_assignment("Y := 1", p)


poly_coeffs = st.lists(st.integers(-3, 3), min_size=4, max_size=4)


@settings(max_examples=200, deadline=None)
@given(poly_coeffs, poly_coeffs)
def test_poly_ring_laws(a, b):
    names = ["Y_x", "A_1_1", "B_1_2"]
    p = Poly.const(a[0]) + sum((Poly.var(n) * c for n, c in zip(names, a[1:])), Poly())
    q = Poly.const(b[0]) + sum((Poly.var(n) * Poly.var(n) * c for n, c in zip(names, b[1:])), Poly())
    assert p * q == q * p and (p + q) * p == p * p + q * p
    env = {"Y_x": RealField(2), "A_1_1": RealField(1, 1), "B_1_2": RealField(-1)}
    assert (p * q).evaluate(env) == p.evaluate(env) * q.evaluate(env)


def test_trace_poly_matches_trace():
    rng = random.Random(2)
    from qet.expectations import trace_with
    from qet.inference import random_rho

    for q in range(2):
        w = projector(1, q, 2)
        for _ in range(10):
            rho = random_rho(2, rng)
            assert trace_poly(w).evaluate(StateEnv(initial_state(load("rus")).store, rho)) == trace_with(w, rho)


# ------------------------------------------------------------------ admissibility


@pytest.mark.parametrize("name", ["cointoss", "rus"])
def test_reachable_states_are_admissible(name):
    p = load(name)
    adm = admissibility(p)
    assert adm.psd_exact
    s = initial_state(p, preset_name="ketplus")
    tr = run_n(Configuration(p.body, s.store, s.rho), 25)
    for _, c in tr.final.items():
        assert adm.holds(StateEnv(c.store, c.rho))
    for sigma in sample_states(p, 50):
        assert adm.holds(StateEnv(sigma.store, sigma.rho))


def test_admissibility_rejects_non_states():
    p = load("cointoss")
    adm = admissibility(p)
    good = {n: RealField(0) for n in state_symbols(p)} | {"A_1_1": RealField(1)}
    assert adm.holds(good)
    assert not adm.holds(good | {"Y_x": RealField(2)})  # not boolean
    assert not adm.holds(good | {"A_1_2": RealField(1), "A_2_1": RealField(1)})  # minor < 0
    assert not adm.holds(good | {"A_1_1": RealField(2)})  # trace 2


def test_minor_poly_is_determinant():
    m = minor_poly((0, 1))
    assert format_poly(m) == "A_1_1*A_2_2 - A_1_2^2 - B_1_2^2"


def test_large_programs_use_diagonal_fallback():
    p = Program((), (), ("a", "b", "c"), Skip())
    assert not admissibility(p).psd_exact


# ------------------------------------------------------------------ sampling


def test_sampling_is_deterministic():
    p = load("cointoss")
    a, b = sample_states(p, 40, seed=5), sample_states(p, 40, seed=5)
    assert a == b and a != sample_states(p, 40, seed=6)
    rhos = [s.rho for s in a]
    assert preset("phi", 1) in rhos and preset("ket1", 1) in rhos
    with pytest.raises(ValueError):
        sample_states(p, 0)


# ------------------------------------------------------------------ refutation


def _check(name, text, samples=1000, **kw):
    p = load(name)
    return check_assignment(p, parse_poly("Y_i", p), parse_assignment(text, p), samples, **kw)


def test_cointoss_assignment_is_not_refuted():
    assert _check("cointoss", COINTOSS_ASSIGNMENT) == NotRefuted(1000)


def test_perturbed_assignment_is_refuted():
    r = _check("cointoss", PERTURBED_ASSIGNMENT)
    assert isinstance(r, RefutedAt)
    assert dict(r.state.store) == {"x": 1, "i": 1} and r.state.rho == preset("ket0", 1)
    assert r.constraint.guard.__class__.__name__ == "BoolGuard"
    assert (r.lhs, r.rhs) == (RealField(3), RealField(2))
    # the witness really violates the constraint
    alpha = complete_assignment(load("cointoss"), parse_poly("Y_i"), parse_assignment(PERTURBED_ASSIGNMENT))
    assert check_constraint(r.constraint, alpha, r.state) is Verdict.VIOLATED


def test_rus_assignment_is_not_refuted():
    assert isinstance(_check("rus", RUS_ASSIGNMENT, 300), NotRefuted)


def test_parallel_check_agrees():
    assert _check("cointoss", PERTURBED_ASSIGNMENT, 200, jobs=2).index == _check("cointoss", PERTURBED_ASSIGNMENT, 200).index


def test_negative_template_is_refuted():
    # constant -1 satisfies every constraint, so only the non-negativity check can fire
    p = load("cointoss")
    r = check_assignment(p, parse_poly("-1"), parse_assignment("X_0 := -1\nX_1 := -1", p), 20)
    assert isinstance(r, RefutedAt) and r.constraint is None
    assert (r.variable, r.index, r.rhs) == ("X", 0, RealField(-1))


def test_missing_variable():
    p = load("cointoss")
    with pytest.raises(KeyError):
        check_assignment(p, parse_poly("Y_i", p), parse_assignment("X_0 := 1", p), 10)


# ------------------------------------------------------------------ encoding faithfulness


ASSIGNMENTS = [
    ("cointoss", COINTOSS_ASSIGNMENT),
    ("cointoss", PERTURBED_ASSIGNMENT),
    ("cointoss", "X_0 := Y_x*A_1_1 + Y_i*B_1_2\nX_1 := A_2_2*A_2_2 + 1"),
    ("rus", RUS_ASSIGNMENT),
    ("rus", "X_0 := Y_i*A_1_1 + 2*Y_x\nX_1 := A_2_2 + A_3_4*A_3_4 + Y_i"),
]


@pytest.mark.parametrize("name, text", ASSIGNMENTS)
def test_encoding_agrees_with_exact_evaluation(name, text):
    p = load(name)
    f = parse_poly("Y_i", p)
    alpha = complete_assignment(p, f, parse_assignment(text, p))
    _, cs = infer_program(p)
    encoded = encode_all(cs, alpha, p.num_qubits)
    pairs = 0
    for sigma in sample_states(p, 220, seed=9):
        for c, e in zip(cs, encoded):
            try:
                verdict = check_constraint(c, alpha, sigma)
            except ZeroDenominatorError:
                continue
            assert e.at_state(sigma.store, sigma.rho).value == verdict.value
            pairs += 1
    assert pairs >= 1000


def test_encoded_atoms_shape():
    p = load("cointoss")
    alpha = complete_assignment(p, parse_poly("Y_i", p), parse_assignment(COINTOSS_ASSIGNMENT, p))
    _, cs = infer_program(p)
    enc = encode_all(cs, alpha, p.num_qubits)
    g4 = next(e for e in enc if e.source.guard.__class__.__name__ == "ProbNonzero")
    assert g4.guard == (Atom(Poly.var("A_1_1"), ">"), Atom(Poly.var("A_2_2"), ">"))
    assert all(a.rel in (">=", ">", "=") for e in enc for a in e.guard + e.side)
    assert Outcome.HOLDS.value == "Holds"


# ------------------------------------------------------------------ templates


CENSUS = [(c, m, d) for c, m in ((0, 1), (2, 1), (3, 1), (1, 2), (2, 2)) for d in (1, 2)]


@pytest.mark.parametrize("classical, qubits, degree", CENSUS)
def test_monomial_census(classical, qubits, degree):
    names = tuple(f"v{i}" for i in range(classical))
    p = Program(names, (), tuple(f"q{i}" for i in range(qubits)), Skip())
    n = classical + 2 ** (2 * qubits + 1)
    assert len(state_symbols(p)) == n
    assert len(monomials(state_symbols(p), degree)) == comb(n + degree, degree)
    poly, coeffs = template(p, "X_0", degree)
    assert len(coeffs) == comb(n + degree, degree) and len(poly.terms) == len(coeffs)


# ------------------------------------------------------------------ SMT export


def _balanced(text: str) -> bool:
    depth = 0
    for line in text.splitlines():
        if line.startswith(";"):
            continue
        for ch in line:
            depth += {"(": 1, ")": -1}.get(ch, 0)
            if depth < 0:
                return False
    return depth == 0


def test_smt_check_export():
    p = load("cointoss")
    text = export_smt_check(p, parse_poly("Y_i", p), parse_assignment(COINTOSS_ASSIGNMENT, p))
    assert text.count("(declare-fun ") == 11  # ten state symbols and sqrt2
    assert "(set-logic QF_NRA)" in text and text.rstrip().endswith("(check-sat)")
    assert _balanced(text)
    assert text == export_smt_check(p, parse_poly("Y_i", p), parse_assignment(COINTOSS_ASSIGNMENT, p))
    check_golden("cointoss.check.smt2", text)


def test_smt_synthesis_export():
    p = load("cointoss")
    text = export_smt_synthesis(p, parse_poly("Y_i", p), 2)
    assert "; 66 coefficients per expectation variable" in text
    for var in ("X", "X_0", "X_1"):
        assert sum(1 for line in text.splitlines() if line.startswith(f"(declare-fun c_{var}_t")) == 66
    assert "(forall (" in text and text.rstrip().endswith("(get-model)")
    assert _balanced(text)
    check_golden("cointoss.synth2.smt2", text)


def test_smt_synthesis_rus_is_well_formed():
    p = load("rus")
    text = export_smt_synthesis(p, parse_poly("Y_i", p), 2)
    assert _balanced(text) and "(set-logic NRA)" in text


def test_smt_synthesis_rejects_bad_degree():
    p = load("cointoss")
    with pytest.raises(ValueError):
        export_smt_synthesis(p, parse_poly("Y_i^3", p), 2)
    with pytest.raises(ValueError):
        export_smt_synthesis(p, parse_poly("Y_i", p), -1)


SOLVER = os.environ.get("QET_SOLVER")


def _solve(text: str) -> str:
    out = subprocess.run([SOLVER, "-in"], input=text, capture_output=True, text=True, timeout=120)
    return out.stdout.split()[0]


@pytest.mark.skipif(not SOLVER or not shutil.which(SOLVER), reason="set QET_SOLVER to an SMT solver binary")
@pytest.mark.parametrize(
    "name, text, expected",
    [("cointoss", COINTOSS_ASSIGNMENT, "unsat"), ("cointoss", PERTURBED_ASSIGNMENT, "sat"), ("rus", RUS_ASSIGNMENT, "unsat")],
)
def test_solver_agrees_with_sampling(name, text, expected):
    p = load(name)
    f = parse_poly("Y_i", p)
    alpha = parse_assignment(text, p)
    assert _solve(export_smt_check(p, f, alpha)) == expected
    sampled = check_assignment(p, f, alpha, 200)
    assert isinstance(sampled, NotRefuted) == (expected == "unsat")
