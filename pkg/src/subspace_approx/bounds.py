"""Exact calculator for the known bounds on approximation exponents.

An instance (n, d, e, j) asks how well a d-dimensional real subspace of R^n can be
approached by rational e-dimensional ones, measured by the j-th angle. Every rule
below records a stable tag, the value it gives and whether its hypothesis held.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .exact_core import PreconditionError


@dataclass(frozen=True)
class ProblemInstance:
    n: int
    d: int
    e: int
    j: int

    def __post_init__(self):
        n, d, e, j = self.n, self.d, self.e, self.j
        if n < 2:
            raise PreconditionError("need n >= 2")
        if not (1 <= d <= n - 1 and 1 <= e <= n - 1):
            raise PreconditionError(f"need 1 <= d, e <= n-1, got d={d}, e={e}")
        if d + e > n:
            raise PreconditionError(f"need d + e <= n, got {d} + {e} > {n}")
        if not 1 <= j <= min(d, e):
            raise PreconditionError(f"need 1 <= j <= min(d, e), got j={j}")

    @property
    def t(self) -> int:
        return min(self.d, self.e)


@dataclass(frozen=True)
class Contribution:
    tag: str
    kind: str  # "lower", "upper" or "exact"
    value: Fraction | None
    applies: bool
    note: str = ""


@dataclass(frozen=True)
class ExponentBounds:
    instance: ProblemInstance
    lower: Fraction
    upper: Fraction | None  # None means no finite upper bound is known
    contributions: tuple = field(repr=False)
    annotations: tuple = field(default=(), repr=False)

    @property
    def is_exact(self) -> bool:
        return self.upper is not None and self.lower == self.upper


def premiere_borne(inst: ProblemInstance) -> Fraction:
    """(n-j)(jn - jd + j^2/2 + j/2 + 1) / (j^2 (n-e)(n-d+j/2+1/2)), halves cleared."""
    n, d, e, j = inst.n, inst.d, inst.e, inst.j
    if n < 4:
        raise PreconditionError("the formula is stated for n >= 4")
    numerator = (n - j) * (2 * j * n - 2 * j * d + j * j + j + 2)
    denominator = j * j * (n - e) * (2 * n - 2 * d + j + 1)
    return Fraction(numerator, denominator)


def _rules(inst: ProblemInstance):
    n, d, e, j, t = inst.n, inst.d, inst.e, inst.j, inst.t
    F = Fraction

    yield Contribution("schmidt-lower", "lower", F(d * (n - j), j * (n - d) * (n - e)), True)
    yield Contribution("schmidt-lower-j1", "lower", F(n * (n - 1), (n - d) * (n - e)), j == 1, "j = 1")

    gap = j + n - d - e
    ok13 = j + n - t >= j * gap
    yield Contribution("schmidt-conditional-lower", "lower", F(j + n - t, j * gap), ok13, "j+n-t >= j(j+n-d-e)")

    gap_t = t + n - d - e
    ok15 = j == t and n >= t * gap_t
    yield Contribution("schmidt-exact-value", "exact", F(n, t * gap_t), ok15, "j = t and n >= t(t+n-d-e)")

    yield Contribution(
        "schmidt-upper",
        "upper",
        F(math.ceil(F(e * (n - e) + 1, n + 1 - d - e)), j),
        True,
    )
    yield Contribution("moshchevitin-2d", "upper", F(2 * d), e == d and j == 1 and d >= 2 and n >= 2 * d, "e = d, j = 1, n >= 2d")
    yield Contribution(
        "moshchevitin-inclusion-2d2",
        "upper",
        F(2 * d * d, d + 1),
        e == d - 1 and j == 1 and d >= 2 and n >= 2 * d,
        "e = d-1, j = 1, n >= 2d",
    )
    yield Contribution("saxce-upper", "upper", F(n, d * (n - d)), e == d and j == d and n >= 2 * d, "e = j = d, n >= 2d")
    yield Contribution("r4-plane-exact", "upper", F(3), (n, d, e, j) == (4, 2, 2, 1), "(4,2,2,1)")
    yield Contribution("r4-plane-inclusion", "upper", F(3), (d, e, j) == (2, 2, 1) and n >= 4, "(n,2,2,1), n >= 4")
    yield Contribution("r5-zeta-upper", "upper", F(6), (n, d, e, j) == (5, 3, 2, 1), "(5,3,2,1)")
    if n >= 4:
        yield Contribution("premiere-borne", "lower", premiere_borne(inst), True, "n >= 4")
    else:
        yield Contribution("premiere-borne", "lower", None, False, "n >= 4")


def known_bounds(inst: ProblemInstance) -> ExponentBounds:
    contributions = tuple(_rules(inst))
    lowers = [c.value for c in contributions if c.applies and c.kind in ("lower", "exact")]
    uppers = [c.value for c in contributions if c.applies and c.kind in ("upper", "exact")]
    lower = max(lowers)
    upper = min(uppers) if uppers else None
    if upper is not None and lower > upper:
        raise AssertionError(f"inconsistent bounds at {inst}: {lower} > {upper}")
    annotations = ()
    if inst.j == inst.e:
        annotations = (("conjecture", Fraction(inst.n, inst.e * (inst.n - inst.d))),)
    return ExponentBounds(inst, lower, upper, contributions, annotations)


def laurent_transfer(mu: Fraction, n: int, e: int, direction: str) -> Fraction:
    """Exponent transferred from dimension e to e+1 ("up") or e-1 ("down")."""
    mu = Fraction(mu)
    if direction == "up":
        if not 1 <= e <= n - 2:
            raise PreconditionError("going up needs 1 <= e <= n-2")
        return (n - e) * mu / (n - e - 1)
    if direction == "down":
        if not 1 <= e <= n - 1 or mu + e - 1 == 0:
            raise PreconditionError("going down needs 1 <= e <= n-1 and mu + e - 1 != 0")
        return e * mu / (mu + e - 1)
    raise PreconditionError(f"direction must be 'up' or 'down', got {direction!r}")


@dataclass(frozen=True)
class QuadraticSurd:
    """rational + scale * sqrt(radicand)."""

    rational: Fraction
    scale: Fraction
    radicand: int

    def value(self, prec: int = 128):
        with mpmath.workprec(prec):
            r = mpmath.mpf(self.rational.numerator) / self.rational.denominator
            s = mpmath.mpf(self.scale.numerator) / self.scale.denominator
            return r + s * mpmath.sqrt(self.radicand)

    def is_at_most(self, x: Fraction) -> bool:
        """Exact test of self <= x (scale is nonnegative)."""
        gap = Fraction(x) - self.rational
        return gap >= 0 and gap * gap >= self.scale * self.scale * self.radicand


def spectrum_threshold(ell: int) -> QuadraticSurd:
    """1 + 1/(2l) + sqrt(1 + 1/(4l^2)) written as (2l+1)/(2l) + sqrt(4l^2+1)/(2l)."""
    if ell < 1:
        raise PreconditionError("need l >= 1")
    return QuadraticSurd(Fraction(2 * ell + 1, 2 * ell), Fraction(1, 2 * ell), 4 * ell * ell + 1)


def valid_instances(n: int):
    for e in range(1, n):
        for d in range(1, n - e + 1):
            for j in range(1, min(d, e) + 1):
                yield ProblemInstance(n, d, e, j)


def render_tables(n_max: int, n_min: int = 2) -> list[ExponentBounds]:
    if not 2 <= n_min <= n_max:
        raise PreconditionError("need 2 <= n_min <= n_max")
    return [known_bounds(inst) for n in range(n_min, n_max + 1) for inst in valid_instances(n)]


def _fmt(x: Fraction | None, exact: bool) -> str:
    if x is None:
        return "inf"
    text = str(x)
    if exact or x.denominator == 1:
        return text
    return f"{text} ({float(x):.6g})"


def tables_csv(rows: list[ExponentBounds]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["n", "d", "e", "j", "lower", "upper", "lower_tags", "upper_tags"])
    for b in rows:
        lower_tags = [c.tag for c in b.contributions if c.applies and c.kind != "upper" and c.value == b.lower]
        upper_tags = [c.tag for c in b.contributions if c.applies and c.kind != "lower" and c.value == b.upper]
        i = b.instance
        writer.writerow([i.n, i.d, i.e, i.j, str(b.lower), "inf" if b.upper is None else str(b.upper),
                         " ".join(lower_tags), " ".join(upper_tags)])
    return out.getvalue()


def tables_text(rows: list[ExponentBounds], exact: bool = False) -> str:
    """One grid per n: rows are dim B, columns dim A, cells list the j entries."""
    lines = []
    by_n: dict[int, list[ExponentBounds]] = {}
    for b in rows:
        by_n.setdefault(b.instance.n, []).append(b)
    for n, items in by_n.items():
        lines.append(f"R^{n}")
        for e in range(1, n):
            for b in items:
                i = b.instance
                if i.e != e:
                    continue
                if b.is_exact:
                    cell = f"= {_fmt(b.lower, exact)}"
                else:
                    cell = f"[{_fmt(b.lower, exact)}, {_fmt(b.upper, exact)}]"
                lines.append(f"  dim B={i.e} dim A={i.d} j={i.j}: {cell}")
        lines.append("")
    return "\n".join(lines)


def symmetry_report(n_max: int) -> list[tuple[ProblemInstance, ExponentBounds, ExponentBounds]]:
    """Instances whose bounds change when d and e are swapped (observation only)."""
    out = []
    for b in render_tables(n_max):
        i = b.instance
        if i.d == i.e:
            continue
        other = known_bounds(ProblemInstance(i.n, i.e, i.d, i.j))
        if (other.lower, other.upper) != (b.lower, b.upper):
            out.append((i, b, other))
    return out
