"""Simultaneous rational approximation with a common denominator q <= Q."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from ..exact_core import PreconditionError
from ..serialization import to_mpf

CHUNK = 1 << 18


@dataclass(frozen=True)
class DirichletResult:
    p: tuple
    q: int
    error: Fraction  # certified upper bound on max_i |x_i - p_i/q|
    satisfies_bound: bool  # error <= q^(-1-1/d), checked exactly


def mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    value = Fraction(int(man)) * (Fraction(2) ** int(exp))
    return -value if sign else value


def enclosure(x, prec: int, slack_bits: int = 4):
    """Rational interval containing the real that the mpf x approximates."""
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        return x, x
    centre = mpf_to_fraction(x)
    radius = abs(centre) * Fraction(2) ** (slack_bits - prec) + Fraction(2) ** (slack_bits - prec)
    return centre - radius, centre + radius


def certified_error(x, p, q: int, prec: int) -> Fraction:
    worst = Fraction(0)
    for xi, pi in zip(x, p):
        lo, hi = enclosure(xi, prec)
        target = Fraction(pi, q)
        worst = max(worst, abs(lo - target), abs(hi - target))
    return worst


def meets_dirichlet_bound(error: Fraction, q: int, d: int) -> bool:
    """error <= q^(-1-1/d), i.e. error^d * q^(d+1) <= 1."""
    return error**d * Fraction(q) ** (d + 1) <= 1


def _inferred_prec(x) -> int:
    """Working precision implied by the mantissas of mpf inputs (at least 53 bits)."""
    bits = [int(v._mpf_[1]).bit_length() for v in x if isinstance(v, mpmath.mpf)]
    return max([53] + bits)


def _exact_rational(x):
    return all(isinstance(v, (int, Fraction)) for v in x)


def dirichlet(x, Q: int, prec: int | None = None) -> DirichletResult:
    """Best common denominator q <= Q for x in the sup norm (smallest q on ties).

    The optimum of ||q x - p||_inf over q <= Q is at most Q^(-1/d) by the
    pigeonhole principle, which yields the q^(-1-1/d) guarantee.
    """
    if Q < 1:
        raise PreconditionError("Q must be at least 1")
    x = list(x)
    d = len(x)
    if d == 0:
        raise PreconditionError("need a nonempty vector")
    prec = prec or _inferred_prec(x)
    if _exact_rational(x):
        fr = [Fraction(v) for v in x]
        lcm = math.lcm(*[v.denominator for v in fr])
        if lcm <= Q:
            p = tuple(int(v * lcm) for v in fr)
            return DirichletResult(p, lcm, Fraction(0), True)
    with mpmath.workprec(prec):
        xs = [to_mpf(v) for v in x]
        approx = np.array([float(v) for v in xs])
        # float scan; anything within the rounding noise of the best is rechecked exactly
        noise = 8.0 * Q * (np.max(np.abs(approx)) + 1.0) * np.finfo(float).eps
        best = math.inf
        shortlist: list[tuple[float, int]] = []
        for start in range(1, Q + 1, CHUNK):
            qs = np.arange(start, min(start + CHUNK, Q + 1), dtype=float)
            scaled = np.outer(qs, approx)
            err = np.max(np.abs(scaled - np.rint(scaled)), axis=1)
            chunk_best = float(err.min())
            if chunk_best <= best + noise:
                idx = np.nonzero(err <= min(best, chunk_best) + noise)[0]
                shortlist.extend((float(err[i]), int(qs[i])) for i in idx)
                best = min(best, chunk_best)
                shortlist = [(e, q) for e, q in shortlist if e <= best + noise]
        exact_best = None
        for _, q in sorted(shortlist, key=lambda item: item[1]):
            p = tuple(int(mpmath.nint(q * v)) for v in xs)
            dist = max(abs(q * v - pi) for v, pi in zip(xs, p))
            if exact_best is None or dist < exact_best[0]:
                exact_best = (dist, q, p)
        _, q, p = exact_best
    g = math.gcd(q, *p)
    if g > 1:
        raise AssertionError("optimal denominator is not primitive")
    error = certified_error(x, p, q, prec)
    return DirichletResult(p, q, error, meets_dirichlet_bound(error, q, d))
