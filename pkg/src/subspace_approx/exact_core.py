"""Exact integer and rational linear algebra.

Matrices are lists of rows. Index sets are 1-based increasing tuples, and every
vector of minors is ordered lexicographically on its row index sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import mpmath


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


@lru_cache(maxsize=None)
def index_sets(r: int, n: int) -> tuple[tuple[int, ...], ...]:
    """All r-subsets of {1..n} in lexicographic order."""
    return tuple(combinations(range(1, n + 1), r))


@lru_cache(maxsize=None)
def index_position(r: int, n: int) -> dict[tuple[int, ...], int]:
    return {subset: pos for pos, subset in enumerate(index_sets(r, n))}


def complement(subset, n: int) -> tuple[int, ...]:
    members = set(subset)
    return tuple(i for i in range(1, n + 1) if i not in members)


def inversion_count(first, second) -> int:
    """Number of pairs (i, j) in first x second with i > j."""
    return sum(1 for i in first for j in second if i > j)


def ell(subset, n: int) -> int:
    return inversion_count(subset, complement(subset, n))


def transpose(matrix):
    return [list(col) for col in zip(*matrix)]


def matmul(left, right):
    cols = transpose(right)
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in left]


def identity(size: int):
    return [[int(i == j) for j in range(size)] for i in range(size)]


def determinant(matrix):
    """Fraction-free (Bareiss) determinant over the integers or rationals."""
    size = len(matrix)
    if size == 0:
        return 1
    if any(len(row) != size for row in matrix):
        raise PreconditionError("determinant needs a square matrix")
    work = [list(row) for row in matrix]
    sign = 1
    previous = 1
    for k in range(size - 1):
        if work[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if work[i][k] != 0), None)
            if swap is None:
                return 0
            work[k], work[swap] = work[swap], work[k]
            sign = -sign
        pivot = work[k][k]
        for i in range(k + 1, size):
            row_i = work[i]
            lead = row_i[k]
            row_k = work[k]
            for j in range(k + 1, size):
                value = row_i[j] * pivot - lead * row_k[j]
                row_i[j] = value // previous if isinstance(value, int) else value / previous
            row_i[k] = 0
        previous = pivot
    return sign * work[-1][-1]


def submatrix(matrix, rows, cols):
    return [[matrix[i - 1][j - 1] for j in cols] for i in rows]


def maximal_minors(matrix) -> list:
    """Minors of an n x r matrix at every r-subset of rows, in lex order."""
    n = len(matrix)
    r = len(matrix[0]) if n else 0
    if r > n:
        raise PreconditionError(f"need r <= n, got r={r}, n={n}")
    cols = tuple(range(1, r + 1))
    return [determinant(submatrix(matrix, rows, cols)) for rows in index_sets(r, n)]


def compound_matrix(matrix, r: int):
    """The r-th exterior power of a square matrix, rows and columns in lex order."""
    n = len(matrix)
    subsets = index_sets(r, n)
    return [[determinant(submatrix(matrix, rows, cols)) for cols in subsets] for rows in subsets]


def laplace_terms(matrix, cols):
    """Signed Laplace expansion terms along the column set, one per row set."""
    n = len(matrix)
    cols = tuple(cols)
    other_cols = complement(cols, n)
    col_sign = ell(cols, n)
    terms = []
    for rows in index_sets(len(cols), n):
        sign = -1 if (ell(rows, n) + col_sign) % 2 else 1
        first = determinant(submatrix(matrix, rows, cols))
        second = determinant(submatrix(matrix, complement(rows, n), other_cols))
        terms.append((sign, first * second))
    return terms


def laplace_determinant(matrix, cols):
    return sum(sign * value for sign, value in laplace_terms(matrix, cols))


def pairing_determinant(minors_a, minors_b, n: int, a: int):
    """det(M_A | M_B) from the maximal minors of an n x a and an n x (n-a) block."""
    expected = math.comb(n, a)
    if len(minors_a) != expected or len(minors_b) != expected:
        raise PreconditionError(
            f"minor vectors must both have length C({n},{a}) = {expected}, "
            f"got {len(minors_a)} and {len(minors_b)}"
        )
    position = index_position(n - a, n)
    total = 0
    for i, rows in enumerate(index_sets(a, n)):
        sign = -1 if ell(rows, n) % 2 else 1
        total += sign * minors_a[i] * minors_b[position[complement(rows, n)]]
    return total


def pairing_signs(n: int, a: int) -> list[int]:
    return [-1 if ell(rows, n) % 2 else 1 for rows in index_sets(a, n)]


@dataclass(frozen=True)
class GramValue:
    """Squared generalized determinant, kept exact when the inputs are rational."""

    value_squared: object

    def value(self, prec: int = 128):
        with mpmath.workprec(prec):
            square = self.value_squared
            if isinstance(square, Fraction):
                square = mpmath.mpf(square.numerator) / square.denominator
            return mpmath.sqrt(mpmath.mpf(square))

    @property
    def is_zero(self) -> bool:
        return self.value_squared == 0


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def gram_matrix(vectors):
    return [[sum(a * b for a, b in zip(u, v)) for v in vectors] for u in vectors]


def generalized_determinant(vectors, prec: int = 128) -> GramValue:
    """D(X_1..X_l)^2 as a Gram determinant; exact for rational vectors."""
    vectors = [list(v) for v in vectors]
    if not vectors:
        return GramValue(1)
    size = len(vectors[0])
    if any(len(v) != size for v in vectors):
        raise PreconditionError("all vectors must live in the same ambient space")
    if all(_is_exact(x) for v in vectors for x in v):
        return GramValue(determinant(gram_matrix(vectors)))
    with mpmath.workprec(prec):
        # product of Gram-Schmidt norms avoids squaring tiny determinants twice
        basis = []
        square = mpmath.mpf(1)
        for v in vectors:
            w = [mpmath.mpf(x) for x in v]
            for _ in range(2):
                for q in basis:
                    coef = mpmath.fsum(a * b for a, b in zip(w, q))
                    w = [a - coef * b for a, b in zip(w, q)]
            norm = mpmath.sqrt(mpmath.fsum(a * a for a in w))
            square *= norm * norm
            if norm == 0:
                return GramValue(mpmath.mpf(0))
            basis.append([a / norm for a in w])
        return GramValue(square)


def block_determinant_commuting(a1, a2, a3, a4):
    """det [[A1, A2], [A3, A4]] = det(A4 A1 - A3 A2) when A1 and A2 commute."""
    if matmul(a1, a2) != matmul(a2, a1):
        raise PreconditionError("the two top blocks must commute")
    left = matmul(a4, a1)
    right = matmul(a3, a2)
    return determinant([[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(left, right)])


def rank(matrix) -> int:
    work = [[Fraction(x) for x in row] for row in matrix]
    rows = len(work)
    cols = len(work[0]) if rows else 0
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if work[i][c] != 0), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        for i in range(r + 1, rows):
            factor = work[i][c] / work[r][c]
            if factor:
                work[i] = [x - factor * y for x, y in zip(work[i], work[r])]
        r += 1
    return r


def hermite_normal_form(rows):
    """Row-style Hermite normal form of an integer matrix; zero rows are dropped."""
    work = [list(map(int, row)) for row in rows]
    if not work:
        return []
    cols = len(work[0])
    pivot_row = 0
    for c in range(cols):
        if pivot_row >= len(work):
            break
        # Euclid down the column until a single nonzero entry remains
        while True:
            nonzero = [i for i in range(pivot_row, len(work)) if work[i][c] != 0]
            if not nonzero:
                break
            best = min(nonzero, key=lambda i: abs(work[i][c]))
            work[pivot_row], work[best] = work[best], work[pivot_row]
            done = True
            for i in range(pivot_row + 1, len(work)):
                if work[i][c]:
                    q = work[i][c] // work[pivot_row][c]
                    work[i] = [x - q * y for x, y in zip(work[i], work[pivot_row])]
                    if work[i][c]:
                        done = False
            if done:
                break
        if work[pivot_row][c] == 0:
            continue
        if work[pivot_row][c] < 0:
            work[pivot_row] = [-x for x in work[pivot_row]]
        pivot = work[pivot_row][c]
        for i in range(pivot_row):
            q = work[i][c] // pivot
            if q:
                work[i] = [x - q * y for x, y in zip(work[i], work[pivot_row])]
        pivot_row += 1
    return [row for row in work[:pivot_row] if any(row)]


def integer_kernel(rows, n: int | None = None):
    """A Z-basis (list of vectors) of {x in Z^n : rows . x = 0}."""
    if n is None:
        n = len(rows[0])
    m = len(rows)
    # reduce [rows^T | I]; rows with a vanishing left part span the kernel lattice
    augmented = [[rows[i][k] for i in range(m)] + [int(k == j) for j in range(n)] for k in range(n)]
    reduced = hermite_normal_form(augmented)
    kernel = [row[m:] for row in reduced if not any(row[:m])]
    return hermite_normal_form(kernel) if kernel else []


def content(values) -> int:
    return math.gcd(*[int(v) for v in values]) if values else 0


def clear_denominators(matrix):
    """Scale each column of a rational matrix to a primitive integer column."""
    cols = transpose(matrix)
    out = []
    for col in cols:
        col = [Fraction(x) for x in col]
        scale = math.lcm(*[x.denominator for x in col])
        ints = [int(x * scale) for x in col]
        g = content(ints)
        out.append([x // g for x in ints] if g else ints)
    return transpose(out)


def saturate_lattice(matrix):
    """Columns forming a Z-basis of span_Q(matrix) intersected with Z^n.

    The result is the Hermite normal form of that lattice (as columns), so two
    inputs with the same rational span give identical outputs.
    """
    n = len(matrix)
    e = len(matrix[0]) if n else 0
    ints = clear_denominators(matrix)
    if rank(ints) != e:
        raise PreconditionError(f"columns are dependent: rank {rank(ints)} < {e}")
    orthogonal = integer_kernel(transpose(ints), n)
    if not orthogonal:
        basis_rows = identity(n)
    else:
        basis_rows = integer_kernel(orthogonal, n)
    return transpose(hermite_normal_form(basis_rows))
