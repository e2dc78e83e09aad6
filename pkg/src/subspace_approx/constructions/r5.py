"""The three-dimensional subspace of R^5 built from the algebraic numbers zeta_1..zeta_5."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import mpmath

from ..angles import RealSubspace
from ..exact_core import PreconditionError, index_position, index_sets
from ..grassmann import check_relations, plucker_relations
from ..serialization import mpf_to_hex, to_mpf


@dataclass(frozen=True)
class R5Construction:
    zeta3: object
    zetas: tuple  # zeta_1 .. zeta_5
    xis: tuple  # Plücker coordinates xi_1 .. xi_10
    prec: int
    residuals: tuple = field(repr=False)
    subspace: RealSubspace = field(repr=False)

    def descriptor(self) -> dict:
        return {"kind": "r5", "zeta3": mpf_to_hex(self.zeta3), "prec": self.prec}


def zeta_values(zeta3, prec: int = 256):
    """zeta_1, zeta_2, zeta_4, zeta_5 and the four denominators, in closed form."""
    with mpmath.workprec(prec):
        z = to_mpf(zeta3)
        s = mpmath.sqrt(2) * mpmath.sqrt(4 * z - 5) * mpmath.sqrt(z - 1)
        shared = 4 * (10 * z**4 - 7 * z**3 - (4 * z**3 + 3 * z**2 + 1) * s - 10 * z**2 + 5 * z - 2)
        small = 2 * (z**2 - 1)
        denominators = {"zeta1": shared, "zeta2": shared, "zeta4": small, "zeta5": small}
        numerators = {
            "zeta1": -(112 * z**4 - 196 * z**3 - (42 * z**3 - 17 * z**2 + 13 * z) * s + 88 * z**2 - 30 * z + 6),
            "zeta2": -(52 * z**4 - 154 * z**3 - (18 * z**3 - 35 * z**2 + 13 * z - 6) * s + 148 * z**2 - 60 * z + 18),
            "zeta4": -(s * z**2 - 6 * z**3 + 3 * z**2 + 3 * z),
            "zeta5": -(s * z - 3 * z**2 + 3 * z),
        }
        margin = mpmath.mpf(2) ** (-prec // 2)
        for name, den in denominators.items():
            scale = max(abs(numerators[name]), mpmath.mpf(1))
            if abs(den) <= margin * scale:
                raise PreconditionError(f"denominator of {name} vanishes at zeta3 = {mpmath.nstr(z, 20)}")
        values = {name: numerators[name] / denominators[name] for name in numerators}
        return (values["zeta1"], values["zeta2"], z, values["zeta4"], values["zeta5"]), denominators


def xi_from_zetas(zetas):
    z1, z2, z3, z4, z5 = zetas
    return (1, z2 + z5, -z1, 1 + z1 + z5, z2, 2 * z2 - z5, -z3, z3, z4, z5)


def basis_from_plucker(coords, r: int, n: int):
    """Columns spanning the subspace of a real decomposable r-vector."""
    subsets = index_sets(r, n)
    position = index_position(r, n)
    pivot = max(range(len(coords)), key=lambda i: abs(coords[i]))
    pivot_set = subsets[pivot]
    columns = []
    for drop in pivot_set:
        rest = tuple(i for i in pivot_set if i != drop)
        col = []
        for i in range(1, n + 1):
            if i in rest:
                col.append(0)
                continue
            sign = -1 if sum(1 for k in rest if k > i) % 2 else 1
            col.append(sign * coords[position[tuple(sorted(rest + (i,)))]])
        columns.append(col)
    return columns


def construct_r5(zeta3, prec: int = 256) -> R5Construction:
    with mpmath.workprec(prec):
        z = to_mpf(zeta3)
        if z < mpmath.mpf(5) / 4:
            raise PreconditionError("zeta3 must be at least 5/4")
        zetas, _ = zeta_values(z, prec)
        xis = tuple(mpmath.mpf(x) for x in xi_from_zetas(zetas))
        relations = plucker_relations(3, 5)
        report = check_relations(list(xis), relations, tolerance=mpmath.mpf(2) ** (64 - prec), prec=prec)
        if not report:
            raise PreconditionError(f"Plücker residual {mpmath.nstr(report.max_residual, 5)} too large")
        residuals = tuple(
            abs(mpmath.fsum(s * xis[a] * xis[b] for s, a, b in rel)) for rel in relations
        )
        subspace = RealSubspace.from_columns(basis_from_plucker(xis, 3, 5), prec, provenance="r5")
    return R5Construction(z, zetas, xis, prec, residuals, subspace)


def rational_root_values():
    """P(X) = 2X^3 - 4X + 1 at the only candidate rational roots +-1, +-1/2."""
    return {x: 2 * x**3 - 4 * x + 1 for x in (Fraction(-1), Fraction(-1, 2), Fraction(1, 2), Fraction(1))}


# Quadrics in (eta3, eta5, eta7, eta9) as {exponent tuple: coefficient}
R5_OBSTRUCTION_SYSTEM = (
    {(2, 0, 0, 0): 1, (0, 2, 0, 0): -2, (0, 1, 1, 0): 2, (0, 1, 0, 1): -1, (0, 0, 1, 1): -1, (0, 0, 0, 2): 1},
    {(1, 0, 1, 0): -1, (0, 1, 0, 1): -1, (0, 0, 1, 1): 1, (0, 0, 0, 2): -1},
    {(1, 0, 1, 0): -1, (0, 0, 2, 0): -1, (0, 0, 1, 1): 1},
    {(0, 1, 1, 0): -2, (1, 0, 0, 1): -1, (0, 0, 1, 1): 1},
    {(1, 0, 1, 0): 1, (0, 1, 1, 0): -2, (0, 1, 0, 1): 1, (0, 0, 1, 1): 1},
)


def evaluate(poly, point):
    total = Fraction(0)
    for exps, coef in poly.items():
        term = Fraction(coef)
        for x, k in zip(point, exps):
            if k:
                term *= x**k
        total += term
    return total


def bounded_rationals(bound: int):
    """Distinct rationals a/b with |a| <= bound and 1 <= b <= bound, sorted."""
    return sorted({Fraction(a, b) for b in range(1, bound + 1) for a in range(-bound, bound + 1)})


def _restrict(poly, fixed: dict):
    """Substitute the variables in fixed; return {(k3, k5): coef} in the remaining two."""
    out: dict = {}
    for exps, coef in poly.items():
        term = Fraction(coef)
        for var, value in fixed.items():
            if exps[var]:
                term *= value ** exps[var]
        key = tuple(exps[v] for v in range(len(exps)) if v not in fixed)
        out[key] = out.get(key, 0) + term
    return {k: v for k, v in out.items() if v}


def _solve_linear(rows):
    """Solve a x + b y = -c over Q; returns ('unique', (x, y)), ('line', ...), ('all',) or None."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return ("all",)
    # Gaussian elimination on [a b | c]
    pivot_rows = []
    work = [r[:] for r in rows]
    col_pivots = []
    r0 = 0
    for c in range(2):
        p = next((i for i in range(r0, len(work)) if work[i][c] != 0), None)
        if p is None:
            continue
        work[r0], work[p] = work[p], work[r0]
        for i in range(len(work)):
            if i != r0 and work[i][c]:
                f = work[i][c] / work[r0][c]
                work[i] = [x - f * y for x, y in zip(work[i], work[r0])]
        col_pivots.append(c)
        r0 += 1
    if any(all(x == 0 for x in row[:2]) and row[2] != 0 for row in work):
        return None
    pivot_rows = work[:r0]
    if len(col_pivots) == 2:
        x = -pivot_rows[0][2] / pivot_rows[0][0]
        y = -pivot_rows[1][2] / pivot_rows[1][1]
        return ("unique", (x, y))
    return ("line", col_pivots[0], pivot_rows[0])


def _quadratic_roots(coeffs: dict):
    """Rational roots of a univariate polynomial given as {degree: coef}, degree <= 2."""
    a, b, c = (Fraction(coeffs.get(k, 0)) for k in (2, 1, 0))
    if a == 0:
        if b == 0:
            return None if c == 0 else []  # None: identically zero
        return [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    num, den = disc.numerator, disc.denominator
    rn, rd = _isqrt_exact(num), _isqrt_exact(den)
    if rn is None or rd is None:
        return []
    root = Fraction(rn, rd)
    return sorted({(-b + root) / (2 * a), (-b - root) / (2 * a)})


def _isqrt_exact(x: int):
    if x < 0:
        return None
    r = math.isqrt(x)
    return r if r * r == x else None


def _is_homogeneous_quadratic(system) -> bool:
    return all(sum(exps) == 2 for poly in system for exps in poly)


def _linear_rows_scaled(compiled, u: int, v: int):
    """Integer (a, b, c) with a*x + b*y + c for each poly linear in (eta3, eta5)."""
    rows = []
    for monomials in compiled:
        a = b = c = 0
        for coef, k3, k5, k7, k9 in monomials:
            value = coef * u**k7 * v**k9
            if k3:
                a += value
            elif k5:
                b += value
            else:
                c += value
        rows.append((a, b, c))
    return rows


def _evaluate_int(monomials, point) -> int:
    x3, x5, x7, x9 = point
    return sum(coef * x3**k3 * x5**k5 * x7**k7 * x9**k9 for coef, k3, k5, k7, k9 in monomials)


def r5_obstruction_search(bound: int, system=R5_OBSTRUCTION_SYSTEM):
    """Search rational (eta3, eta5, eta7, eta9) with entries in the bounded set.

    Returns the sorted nonzero solutions found (empty means none in range).
    The pair (eta7, eta9) is enumerated; eta3 and eta5 are solved exactly from
    the polynomials that are linear in them, and every polynomial is then checked.
    """
    if bound < 1:
        raise PreconditionError("bound must be at least 1")
    values = bounded_rationals(bound)
    found = set()
    compiled = [[(c, *exps) for exps, c in poly.items()] for poly in system]
    linear_idx = [i for i, poly in enumerate(system) if all(k[0] + k[1] <= 1 for k in poly)]
    fast = _is_homogeneous_quadratic(system) and len(linear_idx) >= 2
    linear = [compiled[i] for i in linear_idx]
    for e7, e9 in product(values, repeat=2):
        if fast:
            scale = e7.denominator * e9.denominator // math.gcd(e7.denominator, e9.denominator)
            u = e7.numerator * (scale // e7.denominator)
            v = e9.numerator * (scale // e9.denominator)
            rows = _linear_rows_scaled(linear, u, v)
            pair = next(
                ((r1, r2) for i, r1 in enumerate(rows) for r2 in rows[i + 1:] if r1[0] * r2[1] - r2[0] * r1[1]),
                None,
            )
            if pair is not None:
                (a1, b1, c1), (a2, b2, c2) = pair
                det = a1 * b2 - a2 * b1
                x, y = c2 * b1 - c1 * b2, a2 * c1 - a1 * c2
                # homogeneity: scaling every coordinate by det keeps it integral
                point = (x, y, u * det, v * det)
                if all(_evaluate_int(m, point) == 0 for m in compiled):
                    denom = scale * det
                    found.add((Fraction(x, denom), Fraction(y, denom), e7, e9))
                continue
        found.update(_solve_pair(system, values, e7, e9))
    return sorted(p for p in found if any(p))


def _solve_pair(system, values, e7, e9):
    allowed = set(values)
    restricted = [_restrict(p, {2: e7, 3: e9}) for p in system]
    linear, other = [], []
    for poly in restricted:
        if all(k[0] + k[1] <= 1 for k in poly):
            linear.append([poly.get((1, 0), 0), poly.get((0, 1), 0), poly.get((0, 0), 0)])
        else:
            other.append(poly)
    solved = _solve_linear(linear)
    if solved is None:
        return []
    candidates = []
    if solved[0] == "unique":
        candidates.append(solved[1])
    elif solved[0] == "line":
        _, col, row = solved
        for free in values:
            if col == 0:
                if row[1] == 0:
                    candidates.append((-row[2] / row[0], free))
                else:
                    candidates.append((-(row[2] + row[1] * free) / row[0], free))
            else:
                candidates.append((free, -(row[2] + row[0] * free) / row[1]))
    else:
        for e5 in values:
            roots = None
            for poly in other:
                coeffs: dict = {}
                for (k3, k5), coef in poly.items():
                    coeffs[k3] = coeffs.get(k3, 0) + coef * e5**k5
                if max((k for k, v in coeffs.items() if v), default=0) <= 2:
                    roots = _quadratic_roots(coeffs)
                    if roots is not None:
                        break
            if roots is None:
                roots = values
            candidates.extend((e3, e5) for e3 in roots)
    out = []
    for e3, e5 in candidates:
        point = (Fraction(e3), Fraction(e5), e7, e9)
        if solved[0] != "unique" and not (point[0] in allowed and point[1] in allowed):
            continue
        if all(evaluate(p, point) == 0 for p in system):
            out.append(point)
    return out
