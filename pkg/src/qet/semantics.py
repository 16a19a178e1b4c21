"""Exact small-step execution of programs as a probabilistic reduction system.

A configuration is a statement (or ``None`` once terminated), a classical
store and a density matrix.  One lifted step rewrites every non-terminal
configuration in a sub-distribution and reports the mass that moved.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Sequence

from . import linalg
from .algebraic import ONE, ZERO, FieldElem, RealField, parse_field
from .linalg import Matrix
from .syntax import (
    Assign, GateApp, If, Measure, Program, Reset, Seq, Skip, Stmt, While, embedded_gate,
    eval_expr, reset_kraus, seq,
)

R0 = RealField(0)
R1 = RealField(1)

# ------------------------------------------------------------------ states


class Store(Mapping[str, int]):
    """Immutable classical store; booleans are held as 0/1."""

    __slots__ = ("_items", "_index", "_hash")

    def __init__(self, values: Mapping[str, int] | Iterable[tuple[str, int]] = ()) -> None:
        items = tuple((k, int(v)) for k, v in (values.items() if isinstance(values, Mapping) else values))
        for k, v in items:
            if v < 0:
                raise ValueError(f"negative value {v} for {k!r}")
        self._items = items
        self._index = {k: i for i, (k, _) in enumerate(items)}
        self._hash = hash(items)

    @classmethod
    def initial(cls, program: Program) -> Store:
        return cls((v, 0) for v in program.classical_vars)

    def __getitem__(self, key: str) -> int:
        return self._items[self._index[key]][1]

    def __iter__(self) -> Iterator[str]:
        return (k for k, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def set(self, key: str, value: int) -> Store:
        i = self._index[key]
        items = list(self._items)
        items[i] = (key, value)
        return Store(items)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Store) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{k}: {v}" for k, v in self._items) + "}"


class DensityMatrix:
    """A hermitian, unit-trace matrix over Q(w) of size 2^m."""

    __slots__ = ("entries", "_hash")

    def __init__(self, entries: Sequence[Sequence[object]] | Matrix, *, check_psd: bool = False) -> None:
        m = linalg.matrix(entries)
        n = len(m)
        if n == 0 or n & (n - 1) or any(len(row) != n for row in m):
            raise ValueError("density matrix must be square with power-of-two size")
        if not linalg.is_hermitian(m):
            raise ValueError("density matrix is not hermitian")
        if linalg.trace(m) != ONE:
            raise ValueError("density matrix does not have trace 1")
        if check_psd and n <= 8 and not linalg.is_psd(m):
            raise ValueError("density matrix is not positive semidefinite")
        self.entries = m
        self._hash = hash(m)

    @classmethod
    def from_user(cls, entries: Sequence[Sequence[object]]) -> DensityMatrix:
        """Validated construction, including positivity (up to 3 qubits)."""
        return cls(entries, check_psd=True)

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def __getitem__(self, jk: tuple[int, int]) -> FieldElem:
        return self.entries[jk[0]][jk[1]]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DensityMatrix) and self.entries == other.entries

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"DensityMatrix({linalg.format_matrix(self.entries)})"

    def tensor(self, other: DensityMatrix) -> DensityMatrix:
        return DensityMatrix(linalg.kron(self.entries, other.entries))

    def probability(self, qubit: int, k: int) -> RealField:
        """tr(M^k_qubit rho), the chance of reading ``k`` on ``qubit``."""
        m = self.num_qubits
        acc = ZERO
        for j in range(self.dim):
            if (j >> (m - 1 - qubit)) & 1 == k:
                acc = acc + self.entries[j][j]
        return acc.to_real()

    @classmethod
    def basis(cls, bits: Sequence[int]) -> DensityMatrix:
        n = 2 ** len(bits)
        idx = int("".join(str(b) for b in bits), 2) if bits else 0
        return cls([[1 if (r == c == idx) else 0 for c in range(n)] for r in range(n)])

    @classmethod
    def maximally_mixed(cls, m: int) -> DensityMatrix:
        n = 2 ** m
        return cls(linalg.scale(FieldElem(1) / n, linalg.identity(n)))

    @classmethod
    def from_pure(cls, amplitudes: Sequence[object]) -> DensityMatrix:
        """|psi><psi| / <psi|psi> for a non-zero vector."""
        psi = [FieldElem.coerce(a) for a in amplitudes]  # type: ignore[arg-type]
        norm = ZERO
        for a in psi:
            norm = norm + a * a.conj()
        if norm.is_zero():
            raise ValueError("zero vector")
        inv = norm.inverse()
        return cls([[a * b.conj() * inv for b in psi] for a in psi])


class State(NamedTuple):
    store: Store
    rho: DensityMatrix


# ------------------------------------------------------------------ presets

_SQ2 = FieldElem(0, 1, 0, -1)
_PRESET_1Q: dict[str, Matrix] = {
    "ket0": linalg.matrix([[1, 0], [0, 0]]),
    "ket1": linalg.matrix([[0, 0], [0, 1]]),
    "ketplus": linalg.matrix([[FieldElem(1) / 2,FieldElem(1) / 2], [FieldElem(1) / 2, FieldElem(1) / 2]]),
    "ketminus": linalg.matrix([[FieldElem(1) / 2, FieldElem(-1) / 2], [FieldElem(-1) / 2, FieldElem(1) / 2]]),
    # |phi> = (|0> + sqrt2 |1>)/sqrt3
    "phi": linalg.matrix([[FieldElem(1) / 3, _SQ2 / 3], [_SQ2 / 3, FieldElem(2) / 3]]),
    "mixed": linalg.matrix([[FieldElem(1) / 2, 0], [0, FieldElem(1) / 2]]),
}
PRESETS = tuple(_PRESET_1Q)


def preset(text: str, m: int) -> DensityMatrix:
    """Build a product state from e.g. ``ket0``, ``ketplus^2`` or ``ket0,phi``.

    A single name without exponent is repeated over all ``m`` qubits.
    """
    parts = [p.strip() for p in text.split(",") if p.strip()]
    names: list[str] = []
    for p in parts:
        name, _, count = p.partition("^")
        if name not in _PRESET_1Q:
            raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
        names.extend([name] * (int(count) if count else 1))
    if len(parts) == 1 and "^" not in parts[0]:
        names = names * m
    if len(names) != m:
        raise ValueError(f"preset {text!r} describes {len(names)} qubit(s), program has {m}")
    out: Matrix = ((ONE,),)
    for n in names:
        out = linalg.kron(out, _PRESET_1Q[n])
    return DensityMatrix(out)


def initial_state(program: Program, *, preset_name: str | None = None, store: Mapping[str, int] | None = None) -> State:
    s = Store.initial(program)
    for k, v in (store or {}).items():
        if k not in s:
            raise ValueError(f"store mentions undeclared variable {k!r}")
        if k in program.bool_vars and v not in (0, 1):
            raise ValueError(f"boolean {k!r} must be 0 or 1")
        s = s.set(k, int(v))
    rho = preset(preset_name or "ket0", program.num_qubits)
    return State(s, rho)


def load_state(program: Program, text: str) -> State:
    """Read ``{"store": {...}, "rho": [[...]]}``; entries use the Q(w) text form."""
    data = json.loads(text)
    base = initial_state(program, store=data.get("store", {}))
    if "rho" in data:
        rows = [[parse_field(str(x)) for x in row] for row in data["rho"]]
        rho = DensityMatrix.from_user(rows)
        if rho.num_qubits != program.num_qubits:
            raise ValueError(f"state has {rho.num_qubits} qubit(s), program declares {program.num_qubits}")
        return State(base.store, rho)
    return base


# ------------------------------------------------------------------ quantum primitives


def _conj_by(u: Matrix, rho: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(linalg.conjugate_by(u, rho.entries))


def apply_gate(gate: str, qubits: Sequence[int], rho: DensityMatrix) -> DensityMatrix:
    return _conj_by(embedded_gate(gate, tuple(qubits), rho.num_qubits), rho)


def apply_kraus(ops: Iterable[Matrix], rho: DensityMatrix) -> DensityMatrix:
    acc = linalg.zeros(rho.dim)
    for k in ops:
        acc = linalg.add(acc, linalg.conjugate_by(k, rho.entries))
    return DensityMatrix(acc)


def reset_qubit(qubit: int, rho: DensityMatrix) -> DensityMatrix:
    return apply_kraus(reset_kraus(qubit, rho.num_qubits), rho)


def measure(rho: DensityMatrix, qubit: int) -> tuple[tuple[RealField, DensityMatrix], tuple[RealField, DensityMatrix]]:
    """Outcome probabilities and normalised post-measurement states.

    A zero-probability outcome comes with the maximally mixed state.
    """
    m = rho.num_qubits
    if not 0 <= qubit < m:
        raise IndexError(f"qubit index {qubit} out of range for {m} qubit(s)")
    shift = m - 1 - qubit
    out = []
    for k in (0, 1):
        p = rho.probability(qubit, k)
        if p.is_zero():
            out.append((p, DensityMatrix.maximally_mixed(m)))
            continue
        inv = FieldElem.from_real(p).inverse()
        ent = rho.entries
        rows = tuple(
            tuple(
                ent[r][c] * inv if ((r >> shift) & 1) == k and ((c >> shift) & 1) == k else ZERO
                for c in range(rho.dim)
            )
            for r in range(rho.dim)
        )
        out.append((p, DensityMatrix(rows)))
    return out[0], out[1]


# ------------------------------------------------------------------ configurations


@dataclass(frozen=True)
class Configuration:
    stmt: Stmt | None  # None is the terminal marker
    store: Store
    rho: DensityMatrix

    @property
    def terminal(self) -> bool:
        return self.stmt is None


class ConfigDist:
    """A finitely supported sub-distribution; equal configurations are merged."""

    __slots__ = ("_w",)

    def __init__(self, items: Iterable[tuple[RealField, Configuration]] = ()) -> None:
        w: dict[Configuration, RealField] = {}
        for p, c in items:
            p = RealField.coerce(p)
            if p.sign() < 0:
                raise ValueError("negative weight")
            if p.is_zero():
                continue
            w[c] = w[c] + p if c in w else p
        self._w = w

    @classmethod
    def point(cls, c: Configuration) -> ConfigDist:
        return cls([(R1, c)])

    def items(self) -> list[tuple[RealField, Configuration]]:
        return [(p, c) for c, p in self._w.items()]

    def weight(self, c: Configuration) -> RealField:
        return self._w.get(c, R0)

    def __len__(self) -> int:
        return len(self._w)

    def __iter__(self) -> Iterator[tuple[RealField, Configuration]]:
        return iter(self.items())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ConfigDist) and self._w == other._w

    def mass(self) -> RealField:
        acc = R0
        for p in self._w.values():
            acc = acc + p
        return acc

    def terminal(self) -> ConfigDist:
        return ConfigDist((p, c) for c, p in self._w.items() if c.terminal)

    def nonterminal(self) -> ConfigDist:
        return ConfigDist((p, c) for c, p in self._w.items() if not c.terminal)

    def expectation(self, f: Callable[[Store, DensityMatrix], RealField]) -> RealField:
        acc = R0
        for c, p in self._w.items():
            acc = acc + p * RealField.coerce(f(c.store, c.rho))
        return acc

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{p}: {c}" for c, p in self._w.items()) + "}"


def step(c: Configuration) -> ConfigDist:
    """One reduction of a non-terminal configuration."""
    if c.stmt is None:
        raise ValueError("terminal configuration cannot step")
    return ConfigDist(_step(c.stmt, c.store, c.rho))


def _step(s: Stmt, store: Store, rho: DensityMatrix) -> list[tuple[RealField, Configuration]]:
    if isinstance(s, Skip):
        return [(R1, Configuration(None, store, rho))]
    if isinstance(s, Assign):
        return [(R1, Configuration(None, store.set(s.var, eval_expr(s.expr, store)), rho))]
    if isinstance(s, GateApp):
        return [(R1, Configuration(None, store, apply_gate(s.gate, s.targets, rho)))]
    if isinstance(s, Reset):
        return [(R1, Configuration(None, store, reset_qubit(s.qindex, rho)))]
    if isinstance(s, Measure):
        (p0, r0), (p1, r1) = measure(rho, s.qindex)
        out = []
        for k, p, r in ((0, p0, r0), (1, p1, r1)):
            if not p.is_zero():
                out.append((p, Configuration(None, store.set(s.target, k), r)))
        return out
    if isinstance(s, Seq):
        out = []
        for p, c in _step(s.first, store, rho):
            nxt = s.second if c.stmt is None else seq(c.stmt, s.second)
            out.append((p, Configuration(nxt, c.store, c.rho)))
        return out
    if isinstance(s, If):
        branch = s.then if eval_expr(s.cond, store) else s.orelse
        return [(R1, Configuration(branch, store, rho))]
    if isinstance(s, While):
        if eval_expr(s.cond, store):
            return [(R1, Configuration(seq(s.body, s), store, rho))]
        return [(R1, Configuration(None, store, rho))]
    raise TypeError(f"cannot execute {type(s).__name__}; desugar the program first")


def step_dist(d: ConfigDist) -> tuple[RealField, ConfigDist]:
    """One lifted step: the moved mass and the successor distribution."""
    moved = R0
    out: list[tuple[RealField, Configuration]] = []
    for p, c in d.items():
        if c.terminal:
            out.append((p, c))
            continue
        moved = moved + p
        for q, c2 in _step(c.stmt, c.store, c.rho):  # type: ignore[arg-type]
            out.append((p * q, c2))
    return moved, ConfigDist(out)


@dataclass
class StepTrace:
    """Distributions and running totals along ``n`` lifted steps.

    ``dists[i]`` is the distribution after ``i`` steps; ``weights[i-1]`` the mass moved by step ``i``.
    """

    dists: list[ConfigDist] = field(default_factory=list)
    weights: list[RealField] = field(default_factory=list)
    terminal_mass: list[RealField] = field(default_factory=list)
    edl: list[RealField] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.weights)

    @property
    def final(self) -> ConfigDist:
        return self.dists[-1]

    def nf(self) -> ConfigDist:
        return self.final.terminal()


def run_n(c: Configuration, n: int) -> StepTrace:
    if n < 0:
        raise ValueError("step count must be non-negative")
    d = ConfigDist.point(c)
    tr = StepTrace([d], [], [d.terminal().mass()], [R0])
    for _ in range(n):
        w, d = step_dist(d)
        tr.dists.append(d)
        tr.weights.append(w)
        tr.terminal_mass.append(d.terminal().mass())
        tr.edl.append(tr.edl[-1] + w)
    return tr


def _start(stmt: Stmt, sigma: State) -> Configuration:
    return Configuration(stmt, sigma.store, sigma.rho)


def qwp_series(
    stmt: Stmt, f: Callable[[Store, DensityMatrix], RealField], sigma: State, n: int
) -> list[RealField]:
    """E over the terminal part of each of the first ``n + 1`` distributions."""
    d = ConfigDist.point(_start(stmt, sigma))
    cache: dict[Configuration, RealField] = {}

    def value(c: Configuration) -> RealField:
        v = cache.get(c)
        if v is None:
            v = cache[c] = RealField.coerce(f(c.store, c.rho))
        return v

    def expect(dist: ConfigDist) -> RealField:
        acc = R0
        for p, c in dist.items():
            if c.terminal:
                acc = acc + p * value(c)
        return acc

    out = [expect(d)]
    for _ in range(n):
        _, d = step_dist(d)
        out.append(expect(d))
    return out


def qwp_n(stmt: Stmt, f: Callable[[Store, DensityMatrix], RealField], sigma: State, n: int) -> RealField:
    return qwp_series(stmt, f, sigma, n)[-1]


def qwp_delta_n(stmt: Stmt, f: Callable[[Store, DensityMatrix], RealField], sigma: State, n: int) -> RealField:
    """Increment contributed by the ``n``-th step."""
    s = qwp_series(stmt, f, sigma, n)
    return s[-1] - s[-2] if n > 0 else s[0]


def termination_probe(stmt: Stmt, sigma: State, n: int) -> tuple[RealField, RealField]:
    """Lower bound on the termination probability and the edl prefix after ``n`` steps."""
    tr = run_n(_start(stmt, sigma), n)
    return tr.terminal_mass[-1], tr.edl[-1]
