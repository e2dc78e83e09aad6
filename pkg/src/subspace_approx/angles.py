"""Canonical angles between subspaces at configurable binary precision.

A RealSubspace stores an orthonormal basis as an mpmath matrix. Angles are
reported as sines: psi_1 <= ... <= psi_t, with t = min(d, e).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath

from .exact_core import PreconditionError, rank
from .grassmann import RationalSubspace
from .serialization import mpf_to_hex, to_mpf

DEFAULT_PREC = 128


class PrecisionError(PreconditionError):
    def __init__(self, message: str, required_bits: int):
        super().__init__(f"{message}; need at least {required_bits} bits")
        self.required_bits = required_bits


def orthonormal_columns(columns, prec: int, rel_tol_bits: int = 16):
    """Modified Gram-Schmidt with one reorthogonalization pass."""
    with mpmath.workprec(prec):
        basis = []
        for col in columns:
            w = [to_mpf(x) for x in col]
            norm0 = mpmath.sqrt(mpmath.fsum(x * x for x in w))
            if norm0 == 0:
                raise PreconditionError("zero basis vector")
            for _ in range(2):
                for q in basis:
                    coef = mpmath.fsum(a * b for a, b in zip(w, q))
                    w = [a - coef * b for a, b in zip(w, q)]
            norm = mpmath.sqrt(mpmath.fsum(x * x for x in w))
            if norm <= norm0 * mpmath.mpf(2) ** (rel_tol_bits - prec):
                raise PreconditionError("basis vectors are numerically dependent")
            basis.append([x / norm for x in w])
        n = len(basis[0])
        return mpmath.matrix([[basis[j][i] for j in range(len(basis))] for i in range(n)])


@dataclass(frozen=True)
class RealSubspace:
    n: int
    d: int
    onb: object = field(repr=False)
    prec: int = DEFAULT_PREC
    provenance: str = "random"

    @classmethod
    def from_columns(cls, columns, prec: int = DEFAULT_PREC, provenance: str = "explicit") -> "RealSubspace":
        columns = [list(c) for c in columns]
        onb = orthonormal_columns(columns, prec)
        return cls(onb.rows, onb.cols, onb, prec, provenance)

    @classmethod
    def from_rational(cls, space: RationalSubspace, prec: int = DEFAULT_PREC) -> "RealSubspace":
        return cls.from_columns(space.columns(), prec, provenance=f"rational:{space.plucker}")

    def column(self, j: int):
        return [self.onb[i, j] for i in range(self.n)]

    def orthonormality_defect(self):
        with mpmath.workprec(self.prec):
            gram = self.onb.T * self.onb
            return max(abs(gram[i, j] - (1 if i == j else 0)) for i in range(self.d) for j in range(self.d))


def as_real(space, prec: int) -> RealSubspace:
    if isinstance(space, RealSubspace):
        if space.prec >= prec:
            return space
        return RealSubspace(space.n, space.d, space.onb, prec, space.provenance)
    if isinstance(space, RationalSubspace):
        return RealSubspace.from_rational(space, prec)
    raise TypeError(f"expected a subspace, got {type(space).__name__}")


def _prec_of(*spaces) -> int:
    return max((s.prec for s in spaces if isinstance(s, RealSubspace)), default=DEFAULT_PREC)


def _norm(vec):
    return mpmath.sqrt(mpmath.fsum(x * x for x in vec))


def vector_angle(x, y, prec: int = DEFAULT_PREC):
    """Sine of the angle between two nonzero vectors, from the orthogonal residual."""
    with mpmath.workprec(prec):
        x = [to_mpf(a) for a in x]
        y = [to_mpf(a) for a in y]
        nx, ny = _norm(x), _norm(y)
        if nx == 0 or ny == 0:
            raise PreconditionError("angle with a zero vector is undefined")
        unit = [b / ny for b in y]
        coef = mpmath.fsum(a * b for a, b in zip(x, unit))
        residual = [a - coef * b for a, b in zip(x, unit)]
        return min(_norm(residual) / nx, mpmath.mpf(1))


@dataclass(frozen=True)
class AngleProfile:
    psis: tuple
    witnesses: tuple = field(repr=False)
    prec: int = DEFAULT_PREC
    exact_zeros: int | None = None  # dim of the intersection when it was decided exactly

    @property
    def t(self) -> int:
        return len(self.psis)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "prec": self.prec,
            "psis": [mpf_to_hex(p) for p in self.psis],
            "exact_zeros": self.exact_zeros,
            "witnesses": [[[mpf_to_hex(v) for v in x], [mpf_to_hex(v) for v in y]] for x, y in self.witnesses],
        }


def _singular_values(matrix):
    if matrix.rows == 0 or matrix.cols == 0:
        return []
    return [matrix_value for matrix_value in mpmath.svd_r(matrix, compute_uv=False)]


def principal_angles(first, second, prec: int | None = None, tolerance=None) -> AngleProfile:
    """Sines of the canonical angles and matching witness vector pairs.

    Small angles come from the singular values of the residual after projecting
    one basis onto the other; large ones from the cosines.
    """
    prec = prec or _prec_of(first, second)
    if tolerance is not None and tolerance < mpmath.mpf(2) ** (8 - prec):
        needed = int(-mpmath.log(tolerance, 2)) + 8
        raise PrecisionError("requested tolerance is below the working precision", needed)
    exact_zeros = None
    if isinstance(first, RationalSubspace) and isinstance(second, RationalSubspace):
        both = [list(r1) + list(r2) for r1, r2 in zip(first.zbasis, second.zbasis)]
        exact_zeros = first.e + second.e - rank(both)
    a = as_real(first, prec)
    b = as_real(second, prec)
    if a.n != b.n:
        raise PreconditionError("subspaces live in different ambient spaces")
    swapped = a.d > b.d
    if swapped:
        a, b = b, a
    with mpmath.workprec(prec):
        qa, qb = a.onb, b.onb
        cross = qa.T * qb
        u, cosines, v = mpmath.svd_r(cross)
        residual = qa - qb * cross.T
        sines = sorted(_singular_values(residual))
        half = mpmath.mpf(1) / 2
        psis = []
        witnesses = []
        for i in range(a.d):
            c = min(cosines[i], mpmath.mpf(1))
            s = sines[i]
            psi = s if s * s < half else mpmath.sqrt(max(1 - c * c, mpmath.mpf(0)))
            psis.append(min(psi, mpmath.mpf(1)))
            x = qa * u[:, i]
            y = qb * v[i, :].T
            x, y = [x[k] for k in range(a.n)], [y[k] for k in range(a.n)]
            witnesses.append((y, x) if swapped else (x, y))
        if exact_zeros:
            for i in range(exact_zeros):
                psis[i] = mpmath.mpf(0)
        # enforce the ordering that rounding could disturb
        for i in range(1, len(psis)):
            if psis[i] < psis[i - 1]:
                psis[i] = psis[i - 1]
    return AngleProfile(tuple(psis), tuple(witnesses), prec, exact_zeros)


def psi(first, second, j: int, prec: int | None = None):
    profile = principal_angles(first, second, prec)
    if not 1 <= j <= profile.t:
        raise PreconditionError(f"angle index {j} outside 1..{profile.t}")
    return profile.psis[j - 1]


def intersection_dimension(profile: AngleProfile, threshold_bits: int = 64) -> int:
    """Number of angles below 2^(threshold_bits - prec), or the exact count if known."""
    if profile.exact_zeros is not None:
        return profile.exact_zeros
    cutoff = mpmath.mpf(2) ** (threshold_bits - profile.prec)
    return sum(1 for p in profile.psis if p < cutoff)


@dataclass(frozen=True)
class PhiValue:
    value: object
    product: object


def phi(first, second, prec: int | None = None) -> PhiValue:
    """Product of the canonical angle sines, also computed as a determinant ratio."""
    prec = prec or _prec_of(first, second)
    a = as_real(first, prec)
    b = as_real(second, prec)
    if a.d + b.d > a.n:
        raise PreconditionError("phi needs d + e <= n")
    profile = principal_angles(a, b, prec)
    with mpmath.workprec(prec):
        product = mpmath.fprod(profile.psis)
        # the bases are orthonormal, so the ratio reduces to D(X, Y)
        vectors = [a.column(j) for j in range(a.d)] + [b.column(j) for j in range(b.d)]
        value = mpmath.mpf(1)
        basis = []
        for w in vectors:
            for _ in range(2):
                for q in basis:
                    coef = mpmath.fsum(x * y for x, y in zip(w, q))
                    w = [x - coef * y for x, y in zip(w, q)]
            norm = _norm(w)
            value *= norm
            if norm == 0:
                break
            basis.append([x / norm for x in w])
        return PhiValue(min(value, mpmath.mpf(1)), product)


def phi_complementary(first: RealSubspace, second: RationalSubspace, prec: int | None = None):
    """|det(X | Y)| / (D(X) H(B)) with Y the integer basis of B, for d + e = n."""
    prec = prec or _prec_of(first)
    a = as_real(first, prec)
    if a.d + second.e != a.n:
        raise PreconditionError("phi_complementary needs d + e = n")
    with mpmath.workprec(prec):
        block = mpmath.matrix(a.n, a.n)
        for i in range(a.n):
            for j in range(a.d):
                block[i, j] = a.onb[i, j]
            for j in range(second.e):
                block[i, a.d + j] = second.zbasis[i][j]
        return abs(mpmath.det(block)) / second.height(prec)


def project_onto(space, x, prec: int | None = None):
    """Orthogonal projection of x onto the subspace and the sine of the angle to it."""
    prec = prec or _prec_of(space)
    f = as_real(space, prec)
    with mpmath.workprec(prec):
        vec = mpmath.matrix([to_mpf(a) for a in x])
        proj = f.onb * (f.onb.T * vec)
        proj_list = [proj[i] for i in range(f.n)]
        nx = _norm([vec[i] for i in range(f.n)])
        if nx == 0:
            raise PreconditionError("zero vector")
        if _norm(proj_list) <= nx * mpmath.mpf(2) ** (16 - prec):
            raise PreconditionError("vector is orthogonal to the subspace; angle undefined")
        residual = [vec[i] - proj[i] for i in range(f.n)]
        return proj_list, min(_norm(residual) / nx, mpmath.mpf(1))


def random_orthogonal(n: int, rng, prec: int = DEFAULT_PREC):
    """Haar-ish orthogonal matrix from Gram-Schmidt on Gaussian columns."""
    cols = [[mpmath.mpf(rng.gauss(0, 1)) for _ in range(n)] for _ in range(n)]
    return orthonormal_columns(cols, prec)


def random_subspace(n: int, d: int, rng, prec: int = DEFAULT_PREC) -> RealSubspace:
    cols = [[rng.gauss(0, 1) for _ in range(n)] for _ in range(d)]
    return RealSubspace.from_columns(cols, prec, provenance="random")


def transform(space: RealSubspace, matrix) -> RealSubspace:
    with mpmath.workprec(space.prec):
        image = matrix * space.onb
        cols = [[image[i, j] for i in range(image.rows)] for j in range(image.cols)]
    return RealSubspace.from_columns(cols, space.prec, provenance=space.provenance)
