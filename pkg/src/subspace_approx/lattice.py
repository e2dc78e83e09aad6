"""Small-dimensional lattice tools: LLL, integer linear solving, ellipsoid points."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .exact_core import hermite_normal_form


def lll_reduce(rows, delta=Fraction(3, 4)):
    """Exact LLL reduction of linearly independent integer row vectors."""
    basis = [list(map(int, r)) for r in rows]
    k_max = len(basis)
    if k_max <= 1:
        return basis

    def dot(u, v):
        return sum(a * b for a, b in zip(u, v))

    def gram_schmidt():
        ortho, mu = [], [[Fraction(0)] * k_max for _ in range(k_max)]
        norms = []
        for i in range(k_max):
            v = [Fraction(x) for x in basis[i]]
            for j in range(i):
                mu[i][j] = dot(basis[i], ortho[j]) / norms[j] if norms[j] else Fraction(0)
                v = [a - mu[i][j] * b for a, b in zip(v, ortho[j])]
            ortho.append(v)
            norms.append(dot(v, v))
        return ortho, mu, norms

    ortho, mu, norms = gram_schmidt()
    k = 1
    while k < k_max:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                basis[k] = [a - q * b for a, b in zip(basis[k], basis[j])]
                for i in range(j + 1):
                    mu[k][i] -= q * (mu[j][i] if i < j else 1)
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            basis[k], basis[k - 1] = basis[k - 1], basis[k]
            ortho, mu, norms = gram_schmidt()
            k = max(k - 1, 1)
    return basis


def hnf_with_transform(matrix):
    """Return (H, W) with W unimodular and W @ matrix = H in row Hermite form."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    augmented = [list(map(int, matrix[i])) + [int(i == k) for k in range(rows)] for i in range(rows)]
    reduced = _hnf_keep_rows(augmented, cols)
    return [r[:cols] for r in reduced], [r[cols:] for r in reduced]


def _hnf_keep_rows(work, pivot_cols):
    """Hermite reduction on the first pivot_cols columns, keeping every row."""
    work = [list(r) for r in work]
    pivot_row = 0
    for c in range(pivot_cols):
        if pivot_row >= len(work):
            break
        while True:
            nonzero = [i for i in range(pivot_row, len(work)) if work[i][c] != 0]
            if not nonzero:
                break
            best = min(nonzero, key=lambda i: abs(work[i][c]))
            work[pivot_row], work[best] = work[best], work[pivot_row]
            clean = True
            for i in range(pivot_row + 1, len(work)):
                if work[i][c]:
                    q = work[i][c] // work[pivot_row][c]
                    work[i] = [x - q * y for x, y in zip(work[i], work[pivot_row])]
                    clean = clean and work[i][c] == 0
            if clean:
                break
        if work[pivot_row][c] == 0:
            continue
        if work[pivot_row][c] < 0:
            work[pivot_row] = [-x for x in work[pivot_row]]
        for i in range(pivot_row):
            q = work[i][c] // work[pivot_row][c]
            if q:
                work[i] = [x - q * y for x, y in zip(work[i], work[pivot_row])]
        pivot_row += 1
    return work


class IntegerSolver:
    """Solve rows @ x = rhs over Z, exposing a particular solution and the kernel lattice."""

    def __init__(self, rows):
        self.rows = [list(map(int, r)) for r in rows]
        m = len(self.rows)
        n = len(self.rows[0])
        transposed = [[self.rows[i][k] for i in range(m)] for k in range(n)]
        h, w = hnf_with_transform(transposed)
        # w @ rows^T = h, so rows @ w^T = h^T: columns of w^T act as new variables
        self.m, self.n = m, n
        self.pivots = []
        for r in range(n):
            nz = next((c for c in range(m) if h[r][c]), None)
            if nz is None:
                break
            self.pivots.append(nz)
        self.rank = len(self.pivots)
        self.h = h[: self.rank]
        self.w = w
        kernel = w[self.rank:]
        self.kernel = lll_reduce(kernel) if kernel else []

    def particular(self, rhs):
        """An integer solution, or None when none exists."""
        # rows @ (sum z_r w_r) = sum z_r h_r^T ; h rows are in echelon form
        rhs = list(map(int, rhs))
        z = []
        residual = list(rhs)
        for r, c in enumerate(self.pivots):
            q, rem = divmod(residual[c], self.h[r][c])
            if rem:
                return None
            z.append(q)
            residual = [a - q * b for a, b in zip(residual, self.h[r])]
        if any(residual):
            return None
        x = [0] * self.n
        for coef, row in zip(z, self.w):
            if coef:
                x = [a + coef * b for a, b in zip(x, row)]
        return x


def integer_solution(rows, rhs):
    return IntegerSolver(rows).particular(rhs)


def ellipsoid_points(basis, offset, radius_sq, innermost=None, work=None):
    """Integer t with ||offset + t @ basis||^2 <= radius_sq (Fincke-Pohst).

    basis: list of k integer vectors; offset: integer vector. The optional
    innermost(t, lo, hi) callback replaces the loop over t[0], the last
    coordinate fixed, and returns the admissible values in [lo, hi] itself;
    t[1:] already holds the outer coordinates.
    Bounds are widened slightly so float rounding never drops a point; callers
    re-check exactly. work is a one-element list used as a visit counter.
    """
    k = len(basis)
    offset = [int(x) for x in offset]
    if k == 0:
        if sum(x * x for x in offset) <= radius_sq:
            yield ()
        return
    b = np.array(basis, dtype=float)
    gram = b @ b.T
    chol = np.linalg.cholesky(gram).T  # upper triangular R with gram = R^T R
    # minimise ||o + t B||: unconstrained optimum t* = -(o B^T) gram^{-1}
    center = -np.linalg.solve(gram, b @ np.array(offset, dtype=float))
    base_sq = float(sum(x * x for x in offset)) - float(center @ gram @ center)
    budget = float(radius_sq) - base_sq
    slack = 1e-9 * (abs(float(radius_sq)) + 1.0)
    if budget < -slack:
        return
    # enumerate in reverse order of the upper-triangular factor
    t = [0] * k

    def recurse(level, remaining):
        if work is not None:
            work[0] += 1
        diag = chol[level, level]
        shift = sum(chol[level, i] * (t[i] - center[i]) for i in range(level + 1, k)) / diag
        mid = center[level] - shift
        width = math.sqrt(max(remaining, 0.0) + slack) / diag
        lo, hi = math.ceil(mid - width - 1e-9), math.floor(mid + width + 1e-9)
        if level == 0 and innermost is not None:
            for value in innermost(t, lo, hi):
                t[0] = value
                yield tuple(t)
            return
        for value in range(lo, hi + 1):
            t[level] = value
            used = (diag * (value - mid)) ** 2
            if level == 0:
                yield tuple(t)
            else:
                yield from recurse(level - 1, remaining - used)
        t[level] = 0

    yield from recurse(k - 1, budget)
