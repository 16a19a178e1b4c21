"""Small dense matrices over Q(w), stored as tuples of tuples so they hash."""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

from .algebraic import ONE, ZERO, FieldElem, RealField

Matrix = tuple[tuple[FieldElem, ...], ...]


def matrix(rows: Sequence[Sequence[object]]) -> Matrix:
    return tuple(tuple(FieldElem.coerce(x) for x in row) for row in rows)  # type: ignore[arg-type]


def identity(n: int) -> Matrix:
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def zeros(n: int, m: int | None = None) -> Matrix:
    return tuple(tuple(ZERO for _ in range(n if m is None else m)) for _ in range(n))


def dim(a: Matrix) -> int:
    return len(a)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    out = []
    for row in a:
        nz = [(k, x) for k, x in enumerate(row) if not x.is_zero()]
        out_row = []
        for col in cols:
            acc = ZERO
            for k, x in nz:
                y = col[k]
                if not y.is_zero():
                    acc = acc + x * y
            out_row.append(acc)
        out.append(tuple(out_row))
    return tuple(out)


def dagger(a: Matrix) -> Matrix:
    return tuple(tuple(x.conj() for x in col) for col in zip(*a))


def add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def scale(c: object, a: Matrix) -> Matrix:
    f = FieldElem.coerce(c)  # type: ignore[arg-type]
    return tuple(tuple(f * x for x in row) for row in a)


def kron(a: Matrix, b: Matrix) -> Matrix:
    return tuple(
        tuple(x * y for x in ra for y in rb)
        for ra in a
        for rb in b
    )


def trace(a: Matrix) -> FieldElem:
    acc = ZERO
    for i, row in enumerate(a):
        acc = acc + row[i]
    return acc


def conjugate_by(u: Matrix, rho: Matrix) -> Matrix:
    """``u rho u^dagger``."""
    return matmul(matmul(u, rho), dagger(u))


def is_hermitian(a: Matrix) -> bool:
    n = len(a)
    return all(a[j][k] == a[k][j].conj() for j in range(n) for k in range(j, n))


def is_identity(a: Matrix) -> bool:
    return a == identity(len(a))


def determinant(a: Matrix) -> FieldElem:
    """Gaussian elimination over the field (exact)."""
    n = len(a)
    m = [list(row) for row in a]
    det = ONE
    for col in range(n):
        pivot = next((r for r in range(col, n) if not m[r][col].is_zero()), None)
        if pivot is None:
            return ZERO
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        p = m[col][col]
        det = det * p
        inv = p.inverse()
        for r in range(col + 1, n):
            f = m[r][col]
            if f.is_zero():
                continue
            f = f * inv
            row, prow = m[r], m[col]
            for c in range(col, n):
                if not prow[c].is_zero():
                    row[c] = row[c] - f * prow[c]
    return det


def principal_minors(a: Matrix) -> list[tuple[tuple[int, ...], RealField]]:
    """All principal minors of a hermitian matrix (each is real)."""
    n = len(a)
    out = []
    for size in range(1, n + 1):
        for idx in combinations(range(n), size):
            sub_m = tuple(tuple(a[r][c] for c in idx) for r in idx)
            out.append((idx, determinant(sub_m).real_part()))
    return out


def is_psd(a: Matrix) -> bool:
    """Positive semidefiniteness of a hermitian matrix via all principal minors."""
    return all(v.sign() >= 0 for _, v in principal_minors(a))


def format_matrix(a: Matrix) -> str:
    return "[" + ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in a) + "]"
