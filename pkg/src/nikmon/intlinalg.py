"""Exact integer and rational linear algebra.

Matrices are numpy arrays with ``dtype=object`` holding Python ``int`` or
``fractions.Fraction`` entries, so nothing ever overflows or rounds.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np


def imat(rows) -> np.ndarray:
    """Integer matrix (object dtype) from nested sequences."""
    a = np.array(rows, dtype=object)
    if a.ndim == 1:
        a = a.reshape(len(a), 1) if len(a) else np.zeros((0, 0), dtype=object)
    return np.vectorize(int, otypes=[object])(a) if a.size else a


def ivec(xs: Iterable) -> np.ndarray:
    return np.array([int(x) for x in xs], dtype=object)


def identity(n: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=object)
    for i in range(n):
        m[i, i] = 1
    return m


def zeros(r: int, c: int) -> np.ndarray:
    m = np.empty((r, c), dtype=object)
    m.fill(0)
    return m


def block_diag(blocks: Sequence[np.ndarray]) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = zeros(n, n)
    k = 0
    for b in blocks:
        r = b.shape[0]
        out[k:k + r, k:k + r] = b
        k += r
    return out


def to_fraction(m: np.ndarray) -> np.ndarray:
    return np.vectorize(Fraction, otypes=[object])(m) if m.size else m.copy()


def is_integral(m: np.ndarray) -> bool:
    return all(Fraction(x).denominator == 1 for x in np.asarray(m).flat)


def to_int(m: np.ndarray) -> np.ndarray:
    """Convert an integral rational matrix to ints; raises if not integral."""
    if not is_integral(m):
        raise ValueError("matrix is not integral")
    return np.vectorize(lambda x: int(Fraction(x)), otypes=[object])(m) if m.size else m.copy()


def determinant(m: np.ndarray) -> int:
    """Bareiss fraction-free determinant of a square integer matrix."""
    a = [[int(x) for x in row] for row in np.asarray(m)]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def smith_normal_form(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(U, D, V)`` with ``U @ M @ V == D``.

    ``U`` and ``V`` are unimodular and ``D`` is diagonal with nonnegative
    entries ``d_1 | d_2 | ...``.  Works for any rectangular integer matrix.
    """
    a = [[int(x) for x in row] for row in np.asarray(m)]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row dst += q * row src
        if q:
            ad, as_ = a[dst], a[src]
            for c in range(cols):
                ad[c] += q * as_[c]
            ud, us = u[dst], u[src]
            for c in range(rows):
                ud[c] += q * us[c]

    def add_col(dst, src, q):  # col dst += q * col src
        if q:
            for r in a:
                r[dst] += q * r[src]
            for r in v:
                r[dst] += q * r[src]

    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = a[t][t]
            clean = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    if a[t][j]:
                        clean = False
            if not clean:
                # move the smallest remaining entry of row/col t into the pivot
                best = (abs(p), t, t)
                for i in range(t + 1, rows):
                    if a[i][t] and abs(a[i][t]) < best[0]:
                        best = (abs(a[i][t]), i, t)
                for j in range(t + 1, cols):
                    if a[t][j] and abs(a[t][j]) < best[0]:
                        best = (abs(a[t][j]), t, j)
                swap_rows(t, best[1])
                swap_cols(t, best[2])
                continue
            bad = next(
                (i for i in range(t + 1, rows)
                 for j in range(t + 1, cols) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return (
        np.array(u, dtype=object).reshape(rows, rows),
        np.array(a, dtype=object).reshape(rows, cols),
        np.array(v, dtype=object).reshape(cols, cols),
    )


def invariant_factors(m) -> list[int]:
    _, d, _ = smith_normal_form(m)
    return [int(d[i, i]) for i in range(min(d.shape)) if d[i, i] != 0]


def rational_inverse(m: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse over Q."""
    n = m.shape[0]
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(np.asarray(m))]
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return np.array([row[n:] for row in a], dtype=object).reshape(n, n)


def integer_kernel(m: np.ndarray) -> np.ndarray:
    """Saturated basis (as columns) of ``{x in Z^n : M x = 0}``."""
    m = np.asarray(m)
    n = m.shape[1]
    if m.shape[0] == 0:
        return identity(n)
    _, d, v = smith_normal_form(m)
    r = sum(1 for i in range(min(d.shape)) if d[i, i] != 0)
    return v[:, r:]


def saturation(basis: np.ndarray) -> np.ndarray:
    """Basis (columns) of ``span_Q(basis) ∩ Z^n``."""
    basis = np.asarray(basis)
    u, d, _ = smith_normal_form(basis)
    r = sum(1 for i in range(min(d.shape)) if d[i, i] != 0)
    uinv = to_int(rational_inverse(u))
    return uinv[:, :r]


def column_index(sub: np.ndarray, sup: np.ndarray) -> int | None:
    """Index of span(sub) in span(sup) when both have the same rank, else None."""
    coeffs = solve_in_span(sup, sub)
    if coeffs is None or not is_integral(coeffs):
        return None
    return abs(determinant(to_int(coeffs))) if coeffs.shape[0] == coeffs.shape[1] else None


def solve_in_span(basis: np.ndarray, targets: np.ndarray) -> np.ndarray | None:
    """Rational coefficients ``X`` with ``basis @ X == targets``, or None.

    ``basis`` must have full column rank.
    """
    basis = np.asarray(basis)
    targets = np.asarray(targets)
    n, k = basis.shape
    a = [[Fraction(x) for x in basis[i]] + [Fraction(y) for y in targets[i]] for i in range(n)]
    t = targets.shape[1]
    pivots = []
    row = 0
    for c in range(k):
        p = next((r for r in range(row, n) if a[r][c] != 0), None)
        if p is None:
            raise ValueError("basis does not have full column rank")
        a[row], a[p] = a[p], a[row]
        piv = a[row][c]
        a[row] = [x / piv for x in a[row]]
        for r in range(n):
            if r != row and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        pivots.append(row)
        row += 1
    for r in range(row, n):
        if any(x != 0 for x in a[r][k:]):
            return None
    return np.array([a[r][k:] for r in pivots], dtype=object).reshape(k, t)


def in_lattice(basis: np.ndarray, v: np.ndarray) -> bool:
    """Whether the integer vector ``v`` lies in the Z-span of the columns of ``basis``."""
    x = solve_in_span(basis, np.asarray(v, dtype=object).reshape(-1, 1))
    return x is not None and is_integral(x)


def content(v: Iterable) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def primitive_on_ray(v: Sequence) -> np.ndarray:
    """The primitive integer vector on the ray through a rational vector."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = content(ints)
    if g == 0:
        raise ValueError("zero vector has no ray")
    return ivec(i // g for i in ints)
