from __future__ import annotations

import json
from fractions import Fraction

import pytest

from qet.algebraic import REAL_SQRT2, FieldElem, RealField
from qet.semantics import (
    ConfigDist, Configuration, DensityMatrix, State, Store, apply_gate, initial_state, load_state,
    measure, preset, qwp_n, qwp_series, reset_qubit, run_n, step, termination_probe,
)
from qet.syntax import Assign, Skip, While, parse, seq_items

from .conftest import load

HALF = Fraction(1, 2)


# ------------------------------------------------------------------ states


def test_store_is_immutable():
    s = Store({"x": 0, "i": 3})
    t = s.set("x", 1)
    assert s["x"] == 0 and t["x"] == 1 and t["i"] == 3
    assert s != t and hash(s) == hash(Store({"x": 0, "i": 3}))
    with pytest.raises(KeyError):
        s.set("y", 1)


@pytest.mark.parametrize(
    "rows",
    [
        [[1, 0], [0, 1]],  # trace 2
        [[HALF, 1], [0, HALF]],  # not hermitian
        [[1, 0, 0], [0, 0, 0], [0, 0, 0]],  # not a power of two
    ],
)
def test_density_matrix_validation(rows):
    with pytest.raises(ValueError):
        DensityMatrix(rows)


def test_from_user_checks_positivity():
    with pytest.raises(ValueError):
        DensityMatrix.from_user([[HALF, 1], [1, HALF]])
    assert DensityMatrix.from_user([[HALF, HALF], [HALF, HALF]]) == preset("ketplus", 1)


def test_presets():
    phi = preset("phi", 1)
    assert phi[0, 0] == FieldElem(Fraction(1, 3))
    assert phi[0, 1].to_real() == REAL_SQRT2 / 3
    assert preset("ket0,ket1", 2) == DensityMatrix.basis([0, 1])
    assert preset("ket1", 2) == DensityMatrix.basis([1, 1])
    assert preset("mixed", 2) == DensityMatrix.maximally_mixed(2)
    with pytest.raises(ValueError):
        preset("ket2", 1)
    with pytest.raises(ValueError):
        preset("ket0^3", 2)


def test_load_state_json(cointoss):
    text = json.dumps({"store": {"x": 1, "i": 4}, "rho": [["1/3", "sqrt2/3"], ["sqrt2/3", "2/3"]]})
    s = load_state(cointoss, text)
    assert s.store["i"] == 4 and s.rho == preset("phi", 1)
    with pytest.raises(ValueError):
        load_state(cointoss, json.dumps({"store": {"x": 2}}))
    with pytest.raises(ValueError):
        load_state(cointoss, json.dumps({"rho": [["1", "0", "0", "0"]] + [["0"] * 4] * 3}))


# ------------------------------------------------------------------ quantum primitives


def test_hadamard_and_measurement():
    plus = apply_gate("H", (0,), preset("ket0", 1))
    assert plus == preset("ketplus", 1)
    (p0, r0), (p1, r1) = measure(plus, 0)
    assert p0 == RealField(HALF) and p1 == RealField(HALF)
    assert r0 == preset("ket0", 1) and r1 == preset("ket1", 1)


def test_measurement_with_zero_probability_uses_mixed_state():
    (p0, r0), (p1, r1) = measure(preset("ket0", 1), 0)
    assert p0 == RealField(1) and p1.is_zero()
    assert r1 == DensityMatrix.maximally_mixed(1)


def test_measurement_of_phi():
    (p0, _), (p1, _) = measure(preset("phi", 1), 0)
    assert p0 == RealField(Fraction(1, 3)) and p1 == RealField(Fraction(2, 3))


def test_two_qubit_measurement_and_reset():
    rho = preset("ketplus,ket1", 2)
    (p0, r0), (p1, _) = measure(rho, 1)
    assert p0.is_zero() and p1 == RealField(1)
    assert reset_qubit(1, rho) == preset("ketplus,ket0", 2)
    assert reset_qubit(0, preset("ket1", 2)) == preset("ket0,ket1", 2)


def test_cnot_entangles():
    rho = apply_gate("CNOT", (0, 1), preset("ketplus,ket0", 2))
    bell = DensityMatrix.from_pure([1, 0, 0, 1])
    assert rho == bell


# ------------------------------------------------------------------ reduction rules


def _cfg(src: str, store=None, rho=None) -> Configuration:
    p = parse(src)
    s = initial_state(p, store=store)
    return Configuration(p.body, s.store, rho or s.rho)


@pytest.mark.parametrize(
    "src, store, expected",
    [
        ("bool x; skip", {}, [(1, None, {"x": 0})]),
        ("nat n; n := n + 2", {"n": 1}, [(1, None, {"n": 3})]),
        ("bool x; if x then { skip } else { x := tt }", {"x": 0}, [(1, Assign, {"x": 0})]),
        ("bool x; while x do { x := ff }", {"x": 0}, [(1, None, {"x": 0})]),
        ("bool x; while x do { x := ff }", {"x": 1}, [(1, "seq", {"x": 1})]),
        ("bool x; x := tt; skip", {}, [(1, Skip, {"x": 1})]),
    ],
)
def test_classical_rules(src, store, expected):
    d = step(_cfg(src, store))
    assert len(d) == len(expected)
    for (w, c), (ew, kind, est) in zip(d.items(), expected):
        assert w == RealField(ew)
        assert dict(c.store) == est
        if kind is None:
            assert c.terminal
        elif kind == "seq":
            assert seq_items(c.stmt)[-1].__class__ is While
        else:
            assert isinstance(c.stmt, kind)


def test_measure_rule_splits():
    c = _cfg("bool x; qubit q; x := meas q", rho=preset("ketplus", 1))
    d = step(c)
    assert sorted((str(w), c.store["x"]) for w, c in d.items()) == [("1/2", 0), ("1/2", 1)]
    c0 = _cfg("bool x; qubit q; x := meas q")
    assert len(step(c0)) == 1  # zero-probability branches are dropped


def test_sequence_with_branching_head():
    c = _cfg("bool x; nat n; qubit q; x := meas q; n := 1", rho=preset("ketplus", 1))
    d = step(c)
    assert all(isinstance(cc.stmt, Assign) for _, cc in d.items())


def test_terminal_cannot_step():
    with pytest.raises(ValueError):
        step(Configuration(None, Store(), preset("ket0", 1)))


def test_config_dist_merges_equal_configurations():
    c = Configuration(None, Store({"x": 0}), preset("ket0", 1))
    d = ConfigDist([(HALF, c), (HALF, c)])
    assert len(d) == 1 and d.weight(c) == RealField(1) and d.mass() == RealField(1)


# ------------------------------------------------------------------ runs


def test_cointoss_run_from_ket0():
    p = load("cointoss")
    s = initial_state(p)
    tr = run_n(Configuration(p.body, s.store, s.rho), 11)
    assert [str(w) for w in tr.weights[:6]] == ["1"] * 6
    # first loop exit possible at step 7 (p0 = 1/2 from H|0>)
    assert tr.terminal_mass[6].is_zero() and tr.terminal_mass[7] == RealField(HALF)
    assert tr.terminal_mass[10] == RealField(HALF)
    assert tr.terminal_mass[11] == RealField(Fraction(3, 4))
    assert tr.edl[-1] == sum(tr.weights, RealField(0))


def test_run_zero_steps_is_initial():
    p = load("cointoss")
    s = initial_state(p)
    tr = run_n(Configuration(p.body, s.store, s.rho), 0)
    assert tr.steps == 0 and len(tr.final) == 1 and tr.edl == [RealField(0)]


def test_qwp_of_one_after_termination():
    p = parse("bool x; qubit q; q *= H; x := meas q; if x then { q *= X } else { skip }")
    s = initial_state(p)
    assert qwp_n(p.body, lambda st, r: RealField(1), s, 4) == RealField(1)
    # the conditional still has to take its branch after three steps
    assert qwp_n(p.body, lambda st, r: RealField(1), s, 3).is_zero()


def test_qwp_series_is_monotone_for_non_negative_post():
    p = load("rus")
    s = initial_state(p)
    series = qwp_series(p.body, lambda st, r: RealField(st["i"]), s, 60)
    assert all(a <= b for a, b in zip(series, series[1:]))
    assert series[-1] <= RealField(Fraction(8, 3))


def test_termination_probe_bounds():
    p = load("rus")
    mass, edl = termination_probe(p.body, initial_state(p), 30)
    assert RealField(Fraction(3, 4)) <= mass <= RealField(1)
    assert edl.sign() > 0


def test_state_tuple():
    s = State(Store(), preset("ket0", 1))
    assert s.rho.num_qubits == 1 and s.store == Store()
