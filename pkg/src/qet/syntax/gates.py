"""Clifford+T gate matrices and their embedding into an m-qubit register.

Qubit 0 is the first declared qubit and the most significant tensor factor.
"""

from __future__ import annotations

from functools import lru_cache

from ..algebraic import INV_SQRT2, OMEGA, ZERO, I, FieldElem
from ..linalg import Matrix, matrix

GATE_NAMES = ("I", "X", "Y", "Z", "H", "S", "T", "CNOT")

ARITY = {g: 1 for g in GATE_NAMES}
ARITY["CNOT"] = 2

_GATES: dict[str, Matrix] = {
    "I": matrix([[1, 0], [0, 1]]),
    "X": matrix([[0, 1], [1, 0]]),
    "Y": matrix([[0, -I], [I, 0]]),
    "Z": matrix([[1, 0], [0, -1]]),
    "H": matrix([[INV_SQRT2, INV_SQRT2], [INV_SQRT2, -INV_SQRT2]]),
    # standard unitary phase gate; the printed 1/sqrt2 prefactor would break unitarity
    "S": matrix([[1, 0], [0, I]]),
    "T": matrix([[1, 0], [0, OMEGA]]),
    "CNOT": matrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
}

PROJ0 = matrix([[1, 0], [0, 0]])
PROJ1 = matrix([[0, 0], [0, 1]])
LOWER = matrix([[0, 1], [0, 0]])  # |0><1|


def gate_matrix(name: str) -> Matrix:
    try:
        return _GATES[name]
    except KeyError:
        raise ValueError(f"unknown gate {name!r}") from None


def _bit(index: int, qubit: int, m: int) -> int:
    return (index >> (m - 1 - qubit)) & 1


@lru_cache(maxsize=4096)
def embed(local: Matrix, targets: tuple[int, ...], m: int) -> Matrix:
    """Extend an operator on ``targets`` (in that order) by identities on the other qubits."""
    k = len(targets)
    if len(local) != 2 ** k:
        raise ValueError("operator size does not match number of targets")
    if len(set(targets)) != k:
        raise ValueError(f"duplicate qubit indices {targets}")
    if any(t < 0 or t >= m for t in targets):
        raise ValueError(f"qubit index out of range in {targets} for {m} qubits")
    mask = 0
    for t in targets:
        mask |= 1 << (m - 1 - t)
    n = 2 ** m
    rows = []
    for r in range(n):
        lr = 0
        for t in targets:
            lr = (lr << 1) | _bit(r, t, m)
        row = []
        for c in range(n):
            if (r & ~mask) != (c & ~mask):
                row.append(ZERO)
                continue
            lc = 0
            for t in targets:
                lc = (lc << 1) | _bit(c, t, m)
            row.append(local[lr][lc])
        rows.append(tuple(row))
    return tuple(rows)


def embedded_gate(name: str, targets: tuple[int, ...], m: int) -> Matrix:
    g = gate_matrix(name)
    if ARITY[name] != len(targets):
        raise ValueError(f"gate {name} expects {ARITY[name]} qubit(s), got {len(targets)}")
    return embed(g, tuple(targets), m)


def projector(k: int, qubit: int, m: int) -> Matrix:
    """The measurement operator selecting outcome ``k`` on ``qubit``."""
    return embed(PROJ0 if k == 0 else PROJ1, (qubit,), m)


def reset_kraus(qubit: int, m: int) -> tuple[Matrix, Matrix]:
    return embed(PROJ0, (qubit,), m), embed(LOWER, (qubit,), m)


def as_field(x: object) -> FieldElem:
    return FieldElem.coerce(x)  # type: ignore[arg-type]
