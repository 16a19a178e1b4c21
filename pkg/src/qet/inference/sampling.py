"""Seeded admissible states and sampling-based refutation of candidate assignments."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from ..algebraic import FieldElem, RealField
from ..expectations import (
    Constraint, Verdict, ZeroDenominatorError, check_constraint, constraint_sides, evars,
    infer_program,
)
from ..linalg import add, scale
from ..semantics import PRESETS, DensityMatrix, State, Store, preset
from ..syntax import Program
from .polynomial import Poly

NAT_RANGE = 10


def _corner_rhos(m: int) -> list[DensityMatrix]:
    out: list[DensityMatrix] = []
    for bits in range(2 ** m):
        out.append(DensityMatrix.basis([(bits >> (m - 1 - q)) & 1 for q in range(m)]))
    for name in PRESETS:
        out.append(preset(name, m))
    seen: set[DensityMatrix] = set()
    return [r for r in out if not (r in seen or seen.add(r))]


def _corner_stores(program: Program) -> list[Store]:
    zero = Store.initial(program)
    one = zero
    for v in program.classical_vars:
        one = one.set(v, 1)
    return [zero] if one == zero else [zero, one]


def _small_field(rng: random.Random) -> FieldElem:
    c = [rng.choice((-1, 0, 0, 1)) for _ in range(4)]
    if rng.random() < 0.5:
        c[0] += rng.choice((-2, -1, 1, 2))
    return FieldElem(*c)


def random_pure(m: int, rng: random.Random) -> DensityMatrix:
    n = 2 ** m
    while True:
        amps = [_small_field(rng) if rng.random() < 0.7 else FieldElem(0) for _ in range(n)]
        if any(not a.is_zero() for a in amps):
            return DensityMatrix.from_pure(amps)


def random_rho(m: int, rng: random.Random) -> DensityMatrix:
    """A convex combination of one to three pure states with rational weights."""
    k = rng.choice((1, 1, 2, 3))
    weights = [rng.randint(1, 4) for _ in range(k)]
    total = sum(weights)
    acc = None
    for w in weights:
        term = scale(FieldElem(Fraction(w, total)), random_pure(m, rng).entries)
        acc = term if acc is None else add(acc, term)
    return DensityMatrix(acc)


def random_store(program: Program, rng: random.Random) -> Store:
    s = Store.initial(program)
    for v in program.bool_vars:
        s = s.set(v, rng.randint(0, 1))
    for v in program.nat_vars:
        s = s.set(v, rng.randrange(NAT_RANGE))
    return s


def sample_states(program: Program, count: int, seed: int = 0) -> list[State]:
    """Deterministic admissible states: fixed corner cases first, then random ones."""
    if count < 1:
        raise ValueError("count must be at least 1")
    m = program.num_qubits
    out = [State(s, r) for r in _corner_rhos(m) for s in _corner_stores(program)]
    rng = random.Random(seed)
    while len(out) < count:
        out.append(State(random_store(program, rng), random_rho(m, rng)))
    return out[:count]


# ------------------------------------------------------------------ refutation


@dataclass(frozen=True)
class NotRefuted:
    samples: int

    def __str__(self) -> str:
        return f"NotRefuted ({self.samples} samples)"


@dataclass(frozen=True)
class RefutedAt:
    """A witness state; ``constraint`` is None when a template is negative there."""

    state: State
    constraint: Constraint | None
    lhs: RealField
    rhs: RealField
    index: int
    variable: str = ""

    def __str__(self) -> str:
        return "RefutedAt"


class CheckError(RuntimeError):
    """An evaluation failed; carries the offending constraint."""

    def __init__(self, constraint: Constraint, cause: Exception) -> None:
        super().__init__(f"evaluating G{constraint.order} of X_{constraint.label}: {cause}")
        self.constraint = constraint


def _check_state(
    constraints: list[Constraint], alpha: Mapping[str, Poly], sigma: State, index: int
) -> RefutedAt | None:
    for c in constraints:
        try:
            v = check_constraint(c, alpha, sigma)
            if v is Verdict.VIOLATED:
                lhs, rhs = constraint_sides(c, alpha, sigma)
                return RefutedAt(sigma, c, lhs, rhs, index)
        except ZeroDenominatorError as e:
            raise CheckError(c, e) from e
    for name in sorted(alpha):
        value = alpha[name].at_state(sigma.store, sigma.rho)
        if value.sign() < 0:
            return RefutedAt(sigma, None, RealField(0), value, index, name)
    return None


def _check_chunk(args: tuple) -> RefutedAt | None:
    program, post, alpha, states, start = args
    _, constraints = infer_program(program, post)
    for i, sigma in enumerate(states):
        r = _check_state(constraints, alpha, sigma, start + i)
        if r is not None:
            return r
    return None


def complete_assignment(
    program: Program, f: Poly, alpha: Mapping[str, Poly], post: str = "X"
) -> dict[str, Poly]:
    """``alpha[X := f]``, checking that every variable of the constraint set is covered."""
    full = dict(alpha)
    full[post] = f
    _, constraints = infer_program(program, post)
    needed: set[str] = set()
    for c in constraints:
        needed |= evars(c.lhs) | {c.rhs.name}
    missing = sorted(needed - set(full))
    if missing:
        raise KeyError(f"assignment has no polynomial for {', '.join(missing)}")
    return full


def check_assignment(
    program: Program,
    f: Poly,
    alpha: Mapping[str, Poly],
    samples: int = 1000,
    seed: int = 0,
    jobs: int = 1,
) -> NotRefuted | RefutedAt:
    """Check every constraint of ``qinfer(program, X)`` exactly at seeded sample states.

    The first violation in sample order wins, independently of ``jobs``.
    """
    full = complete_assignment(program, f, alpha)
    states = sample_states(program, samples, seed)
    if jobs <= 1:
        result = _check_chunk((program, "X", full, states, 0))
    else:
        size = -(-len(states) // jobs)
        chunks = [(program, "X", full, states[i:i + size], i) for i in range(0, len(states), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            found = [r for r in pool.map(_check_chunk, chunks) if r is not None]
        result = min(found, key=lambda r: r.index) if found else None
    return NotRefuted(len(states)) if result is None else result
