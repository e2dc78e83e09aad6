"""Rational subspaces through their primitive integer Plücker vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .exact_core import (
    PreconditionError,
    compound_matrix,
    content,
    determinant,
    gram_matrix,
    hermite_normal_form,
    index_position,
    index_sets,
    inversion_count,
    maximal_minors,
    matmul,
    rank,
    saturate_lattice,
    transpose,
)


def normalize_sign(coords):
    """Divide by the content and make the first nonzero entry positive."""
    coords = [int(c) for c in coords]
    g = content(coords)
    if g == 0:
        return tuple(coords)
    lead = next(c for c in coords if c)
    if lead < 0:
        g = -g
    return tuple(c // g for c in coords)


@dataclass(frozen=True)
class RationalSubspace:
    n: int
    e: int
    zbasis: tuple  # n rows of e integers, columns form a Z-basis of B ∩ Z^n
    plucker: tuple
    height_squared: int

    def height(self, prec: int = 128):
        with mpmath.workprec(prec):
            return mpmath.sqrt(mpmath.mpf(self.height_squared))

    @property
    def key(self):
        return (self.height_squared, self.plucker)

    def columns(self):
        return [list(col) for col in zip(*self.zbasis)]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "e": self.e,
            "zbasis": [str(x) for row in self.zbasis for x in row],
            "plucker": [str(x) for x in self.plucker],
            "height_squared": str(self.height_squared),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RationalSubspace":
        n, e = int(data["n"]), int(data["e"])
        flat = [int(x) for x in data["zbasis"]]
        zbasis = tuple(tuple(flat[i * e:(i + 1) * e]) for i in range(n))
        space = cls(n, e, zbasis, tuple(int(x) for x in data["plucker"]), int(data["height_squared"]))
        if from_basis(zbasis).plucker != space.plucker:
            raise PreconditionError("serialized Plücker vector does not match the basis")
        return space


def from_basis(matrix) -> RationalSubspace:
    """Build a rational subspace from any rational basis given as n x e rows."""
    matrix = [list(row) for row in matrix]
    n = len(matrix)
    e = len(matrix[0]) if n else 0
    if e == 0 or e > n:
        raise PreconditionError(f"need 1 <= e <= n, got e={e}, n={n}")
    exact = all(isinstance(x, int) for row in matrix for x in row)
    minors = maximal_minors(matrix) if exact else None
    if exact and content(minors) == 1:
        # already a Z-basis of the saturated lattice; only canonicalize it
        zbasis = transpose(hermite_normal_form(transpose(matrix)))
    else:
        if not exact and rank([[Fraction(x) for x in row] for row in matrix]) < e:
            raise PreconditionError("columns are dependent")
        if exact and not any(minors):
            raise PreconditionError("columns are dependent")
        zbasis = saturate_lattice(matrix)
    plucker = normalize_sign(maximal_minors(zbasis))
    height_squared = sum(c * c for c in plucker)
    return RationalSubspace(n, e, tuple(tuple(row) for row in zbasis), plucker, height_squared)


def from_plucker(coords, r: int, n: int) -> RationalSubspace:
    """Reconstruct the subspace of a decomposable integer r-vector."""
    coords = list(coords)
    if not any(coords):
        raise PreconditionError("zero vector is not a Plücker vector")
    subsets = index_sets(r, n)
    position = index_position(r, n)
    pivot = max(range(len(coords)), key=lambda i: abs(coords[i]))
    pivot_set = subsets[pivot]
    vectors = []
    for drop in pivot_set:
        rest = tuple(i for i in pivot_set if i != drop)
        vec = []
        for i in range(1, n + 1):
            if i in rest:
                vec.append(0)
                continue
            # coordinate of (rest, i) as an ordered tuple
            sign = -1 if sum(1 for k in rest if k > i) % 2 else 1
            vec.append(sign * coords[position[tuple(sorted(rest + (i,)))]])
        vectors.append(vec)
    space = from_basis(transpose(vectors))
    if space.plucker != normalize_sign(coords):
        raise PreconditionError("coordinates are not decomposable")
    return space


def is_plucker_vector(coords, r: int, n: int) -> bool:
    return bool(check_relations(coords, plucker_relations(r, n)))


@dataclass(frozen=True)
class PluckerRelationSet:
    """Quadratic relations; each is a tuple of (sign, a, b) meaning sign * x_a * x_b.

    Coordinate indices are 0-based positions in the lexicographic order.
    """

    r: int
    n: int
    relations: tuple

    def __len__(self):
        return len(self.relations)

    def __iter__(self):
        return iter(self.relations)


def _canonical_relation(terms: dict):
    monomials = sorted((key, coef) for key, coef in terms.items() if coef)
    if not monomials:
        return None
    g = math.gcd(*[c for _, c in monomials])
    if monomials[0][1] < 0:
        g = -g
    return tuple((c // g, a, b) for (a, b), c in monomials)


def plucker_relations(r: int, n: int) -> PluckerRelationSet:
    if not 1 <= r <= n - 1:
        raise PreconditionError(f"need 1 <= r <= n-1, got r={r}, n={n}")
    position = index_position(r, n)
    found = set()
    for small in index_sets(r - 1, n):
        for large in index_sets(r + 1, n):
            terms: dict = {}
            for k, jk in enumerate(large, start=1):
                if jk in small:
                    continue
                sign = -1 if (k + inversion_count(small, (jk,))) % 2 else 1
                a = position[tuple(sorted(small + (jk,)))]
                b = position[tuple(i for i in large if i != jk)]
                key = (min(a, b), max(a, b))
                terms[key] = terms.get(key, 0) + sign
            relation = _canonical_relation(terms)
            if relation is not None:
                found.add(relation)
    return PluckerRelationSet(r, n, tuple(sorted(found, key=lambda rel: [(a, b, s) for s, a, b in rel])))


@dataclass(frozen=True)
class RelationCheck:
    ok: bool
    max_residual: object
    tolerance: object
    degenerate: bool

    def __bool__(self):
        return self.ok


def evaluate_relations(coords, relations: PluckerRelationSet):
    return [sum(s * coords[a] * coords[b] for s, a, b in rel) for rel in relations]


def check_relations(coords, relations: PluckerRelationSet, tolerance=None, prec: int = 128) -> RelationCheck:
    expected = math.comb(relations.n, relations.r)
    if len(coords) != expected:
        raise PreconditionError(f"expected {expected} coordinates, got {len(coords)}")
    degenerate = not any(coords)
    if all(isinstance(c, (int, Fraction)) for c in coords):
        residuals = evaluate_relations(coords, relations)
        worst = max((abs(x) for x in residuals), default=0)
        return RelationCheck(worst == 0, worst, 0, degenerate)
    with mpmath.workprec(prec):
        if tolerance is None:
            tolerance = mpmath.mpf(2) ** (32 - prec)
        residuals = evaluate_relations([mpmath.mpf(c) for c in coords], relations)
        worst = max((abs(x) for x in residuals), default=mpmath.mpf(0))
        return RelationCheck(bool(worst < tolerance), worst, tolerance, degenerate)


def covolume_squared(space: RationalSubspace) -> int:
    """Gram determinant of the stored Z-basis; equals the squared height."""
    cols = space.columns()
    return determinant(gram_matrix(cols))


@dataclass(frozen=True)
class ImageBound:
    """Certificate for H(phi(B)) <= c(phi) H(B), carried as exact squares."""

    c_squared: Fraction
    denominator: int
    holds: bool

    def constant(self, prec: int = 128):
        with mpmath.workprec(prec):
            return mpmath.sqrt(mpmath.mpf(self.c_squared.numerator) / self.c_squared.denominator)


def image_constant(phi, e: int) -> tuple[int, Fraction]:
    """Denominator-clearing factor and squared Frobenius bound of the e-th compound."""
    phi = [[Fraction(x) for x in row] for row in phi]
    compound = compound_matrix(phi, e)
    k = math.lcm(*[Fraction(x).denominator for row in compound for x in row])
    frobenius = sum(Fraction(x) ** 2 for row in compound for x in row)
    return k, k * k * frobenius


def image_subspace(phi, space: RationalSubspace) -> tuple[RationalSubspace, ImageBound]:
    image = matmul([[Fraction(x) for x in row] for row in phi], [list(row) for row in space.zbasis])
    if rank(image) < space.e:
        raise PreconditionError("the map drops the dimension of the subspace")
    image = [[int(x) if Fraction(x).denominator == 1 else x for x in row] for row in image]
    result = from_basis(image)
    k, c_squared = image_constant(phi, space.e)
    holds = result.height_squared <= c_squared * space.height_squared
    return result, ImageBound(c_squared, k, holds)


def canonical_equal(first: RationalSubspace, second: RationalSubspace) -> bool:
    if (first.n, first.e) != (second.n, second.e):
        raise PreconditionError("subspaces have different shapes")
    return first.plucker == second.plucker
