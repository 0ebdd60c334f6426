"""Exact integer and rational linear algebra.

Everything here runs on Python ints, fractions.Fraction, or QuadExt numbers
(elements of a real quadratic field), so the cohomology and trace-group
computations never touch floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

IntMatrix = list[list[int]]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)]
            for i in range(rows)]


def transpose(a):
    return [list(col) for col in zip(*a)]


def smith_normal_form(a: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """(U, D, V) with U a V = D diagonal, d_1 | d_2 | ..., det U, det V = +-1."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    d = [row[:] for row in a]
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):
        # row dst += q * row src
        for k in range(cols):
            d[dst][k] += q * d[src][k]
        for k in range(rows):
            u[dst][k] += q * u[src][k]

    def add_col(src, dst, q):
        for row in d:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    def negate_row(i):
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(rows, cols):
        # locate the smallest nonzero entry in the remaining block
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if d[i][j] != 0 and (best is None or abs(d[i][j]) < best):
                    best = abs(d[i][j])
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, rows):
                if d[i][t] != 0:
                    q = d[i][t] // d[t][t]
                    add_row(t, i, -q)
                    if d[i][t] != 0:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, cols):
                if d[t][j] != 0:
                    q = d[t][j] // d[t][t]
                    add_col(t, j, -q)
                    if d[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
            if not dirty:
                # enforce divisibility of the remaining block by the pivot
                for i in range(t + 1, rows):
                    for j in range(t + 1, cols):
                        if d[i][j] % d[t][t] != 0:
                            add_row(i, t, 1)
                            dirty = True
                            break
                    if dirty:
                        break
        if d[t][t] < 0:
            negate_row(t)
        t += 1
    return u, d, v


def hermite_column_form(a: IntMatrix) -> IntMatrix:
    """Column-style Hermite normal form of the lattice spanned by the columns.

    Returns an n x r matrix whose columns are the canonical lattice basis
    (pivot entries positive, entries to their right reduced).  Column order is
    by pivot row, so equal lattices give identical output.
    """
    n = len(a)
    work = [row[:] for row in a]
    ncols = len(work[0]) if n else 0
    col = 0
    for row in range(n):
        if col >= ncols:
            break
        # gcd sweep on this row among columns >= col
        while True:
            nz = [j for j in range(col, ncols) if work[row][j] != 0]
            if not nz:
                break
            jmin = min(nz, key=lambda j: abs(work[row][j]))
            for r in range(n):
                work[r][col], work[r][jmin] = work[r][jmin], work[r][col]
            if all(work[row][j] % work[row][col] == 0 for j in range(col + 1, ncols)):
                for j in range(col + 1, ncols):
                    q = work[row][j] // work[row][col]
                    if q:
                        for r in range(n):
                            work[r][j] -= q * work[r][col]
                break
            for j in range(col + 1, ncols):
                q = work[row][j] // work[row][col]
                if q:
                    for r in range(n):
                        work[r][j] -= q * work[r][col]
        if work[row][col] != 0:
            if work[row][col] < 0:
                for r in range(n):
                    work[r][col] = -work[r][col]
            # reduce earlier columns against this pivot
            for j in range(col):
                q = work[row][j] // work[row][col]
                if q:
                    for r in range(n):
                        work[r][j] -= q * work[r][col]
            col += 1
    kept = [[work[r][j] for j in range(col)] for r in range(n)]
    return kept


def frac_matrix(a) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in a]


def frac_rref(a: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rref, pivot columns)."""
    m = [row[:] for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        pivot_row = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                factor = m[i][c]
                m[i] = [x - factor * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def frac_kernel(a) -> list[list[Fraction]]:
    """Basis of the right kernel over Q."""
    m = frac_matrix(a)
    if not m:
        return []
    cols = len(m[0])
    rref, pivots = frac_rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * cols
        vec[f] = Fraction(1)
        for r, c in enumerate(pivots):
            vec[c] = -rref[r][f]
        basis.append(vec)
    return basis


def frac_solve(a, b):
    """One solution of a x = b over Q, or None if inconsistent."""
    m = frac_matrix(a)
    rows = len(m)
    cols = len(m[0]) if rows else 0
    aug = [m[i] + [Fraction(b[i])] for i in range(rows)]
    rref, pivots = frac_rref(aug)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for r, c in enumerate(pivots):
        x[c] = rref[r][cols]
    return x


def frac_inverse(a):
    """Exact inverse of a square rational matrix."""
    n = len(a)
    m = frac_matrix(a)
    aug = [m[i] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    rref, pivots = frac_rref(aug)
    if pivots != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in rref]


def saturation(columns: IntMatrix) -> IntMatrix:
    """Basis (as columns) of the saturation of the column span inside Z^n.

    The saturation is (Q-span of the columns) intersected with Z^n; it is the
    smallest pure sublattice containing the input.
    """
    n = len(columns)
    if n == 0 or not columns[0]:
        return [[] for _ in range(n)]
    u, d, _v = smith_normal_form(columns)
    rank = sum(1 for i in range(min(n, len(d[0]))) if d[i][i] != 0)
    uinv = frac_inverse(u)
    basis = [[int(uinv[r][i]) for i in range(rank)] for r in range(n)]
    return hermite_column_form(basis)


# -- quadratic field numbers -------------------------------------------------

@dataclass(frozen=True)
class QuadExt:
    """Number a + b sqrt(d) with rational a, b and squarefree d > 1."""

    a: Fraction
    b: Fraction
    d: int

    @staticmethod
    def of(a, b=0, d=5) -> "QuadExt":
        return QuadExt(Fraction(a), Fraction(b), d)

    def _check(self, other: "QuadExt"):
        if self.d != other.d:
            raise ValueError("mixing different quadratic fields")

    def __add__(self, other):
        other = _coerce(other, self.d)
        self._check(other)
        return QuadExt(self.a + other.a, self.b + other.b, self.d)

    def __sub__(self, other):
        other = _coerce(other, self.d)
        self._check(other)
        return QuadExt(self.a - other.a, self.b - other.b, self.d)

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.d)

    def __mul__(self, other):
        other = _coerce(other, self.d)
        self._check(other)
        return QuadExt(self.a * other.a + self.d * self.b * other.b,
                       self.a * other.b + self.b * other.a, self.d)

    def __truediv__(self, other):
        other = _coerce(other, self.d)
        self._check(other)
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        conj = other.conjugate()
        num = self * conj
        return QuadExt(num.a / n, num.b / n, self.d)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return _coerce(other, self.d) - self

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"({self.a}+{self.b}*sqrt({self.d}))"


def _coerce(x, d: int) -> QuadExt:
    if isinstance(x, QuadExt):
        return x
    return QuadExt(Fraction(x), Fraction(0), d)


def field_kernel_vector(matrix, zero, one):
    """One kernel vector of a square matrix over an arbitrary field.

    Entries must support +, -, *, / and an is_zero() test (QuadExt or
    Fraction wrapped accordingly).  Returns None when the matrix is regular.
    """
    n = len(matrix)
    m = [row[:] for row in matrix]
    piv_col_of_row = []
    used_cols = []
    r = 0
    for c in range(n):
        pivot_row = None
        for i in range(r, n):
            if not _is_zero(m[i][c]):
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv_p = one / m[r][c]
        m[r] = [x * inv_p for x in m[r]]
        for i in range(n):
            if i != r and not _is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        piv_col_of_row.append(c)
        used_cols.append(c)
        r += 1
    free = [c for c in range(n) if c not in used_cols]
    if not free:
        return None
    f = free[0]
    vec = [zero] * n
    vec[f] = one
    for row, c in enumerate(piv_col_of_row):
        vec[c] = zero - m[row][f]
    return vec


def _is_zero(x) -> bool:
    if isinstance(x, QuadExt):
        return x.is_zero()
    return x == 0
