"""Acceptance criteria 1-13, one PASS/FAIL line each.

Run with pytest (lines appear in the terminal summary) or directly with
`python tests/test_acceptance.py [numbers...]`.
"""

from fractions import Fraction
from itertools import product
import math
import os
import random
import sys
import tempfile
import time

import mpmath
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from subspace_approx.angles import (
    RealSubspace,
    phi,
    principal_angles,
    random_orthogonal,
    random_subspace,
    transform,
    vector_angle,
)
from subspace_approx.bounds import render_tables
from subspace_approx.cli import main as cli_main
from subspace_approx.constructions.dirichlet import certified_error, dirichlet, meets_dirichlet_bound
from subspace_approx.constructions.pipeline import geometric_schedule, lower_bound_pipeline
from subspace_approx.constructions.r4 import construct_r4, r4_mod4_residues, r4_obstruction_holds
from subspace_approx.constructions.r5 import construct_r5, r5_obstruction_search, rational_root_values
from subspace_approx.constructions.spectrum import SpectrumConfig, height_upper_constant, spectrum_build
from subspace_approx.enumeration import EnumerationPlan, fit_exponent, frontier
from subspace_approx.exact_core import (
    content,
    determinant,
    gram_matrix,
    index_sets,
    laplace_determinant,
    laplace_terms,
    maximal_minors,
    pairing_determinant,
    rank,
    saturate_lattice,
)
from subspace_approx.grassmann import check_relations, from_basis, plucker_relations
from figures import FIGURES
from oracles import continued_fraction_convergents, leibniz_det

TOL = mpmath.mpf(2) ** -96


# -- 1: relation sets ------------------------------------------------------------------


def _poly(relation):
    return {(a, b): s for s, a, b in relation}


def _displayed(lhs, rhs):
    """x_a x_b - sum x_c x_d with 1-based indices."""
    poly = {tuple(sorted((lhs[0] - 1, lhs[1] - 1))): 1}
    for c, d in rhs:
        poly[tuple(sorted((c - 1, d - 1)))] = -1
    return poly


def _matches(p, q):
    return p == q or p == {k: -v for k, v in q.items()}


def criterion_1():
    four = [_poly(r) for r in plucker_relations(2, 4)]
    ok4 = len(four) == 1 and _matches(four[0], {(0, 5): 1, (1, 4): -1, (2, 3): 1})
    displayed = [
        _displayed((2, 5), [(3, 4), (1, 6)]),
        _displayed((2, 8), [(3, 7), (1, 9)]),
        _displayed((4, 8), [(5, 7), (1, 10)]),
        _displayed((4, 9), [(6, 7), (2, 10)]),
        _displayed((5, 9), [(6, 8), (3, 10)]),
    ]
    five = [_poly(r) for r in plucker_relations(3, 5)]
    ok5 = len(five) == 5 and all(sum(_matches(t, r) for r in five) == 1 for t in displayed)
    return ok4 and ok5, f"(2,4): {len(four)} relation, (3,5): {len(five)} relations", 1


# -- 2: exact properties of random rational subspaces -----------------------------------


def criterion_2():
    rng = random.Random(2)
    for _ in range(500):
        n = rng.randint(2, 6)
        e = rng.randint(1, n - 1)
        while True:
            matrix = [[Fraction(rng.randint(-12, 12), rng.randint(1, 4)) for _ in range(e)] for _ in range(n)]
            if rank(matrix) == e:
                break
        space = from_basis(matrix)
        zbasis = saturate_lattice(matrix)
        gram = determinant(gram_matrix([list(col) for col in zip(*zbasis)]))
        checks = (
            check_relations(space.plucker, plucker_relations(e, n)).ok,
            math.gcd(*space.plucker) == 1,
            gram == space.height_squared,
            content(maximal_minors(zbasis)) == 1,
        )
        if not all(checks):
            return False, f"failed at n={n} e={e}: {checks}", 30
    return True, "500 subspaces, relations, gcd, Gram determinant and covolume exact", 30


# -- 3: Laplace and pairing ------------------------------------------------------------


def criterion_3():
    rng = random.Random(3)
    for trial in range(1000):
        n = 4 if trial % 2 else 6
        matrix = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
        expected = leibniz_det(matrix)
        cols = rng.choice(index_sets(rng.randint(1, n - 1), n))
        if laplace_determinant(matrix, cols) != expected:
            return False, f"laplace mismatch on trial {trial}", 30
        a = rng.randint(1, n - 1)
        left = [row[:a] for row in matrix]
        right = [row[a:] for row in matrix]
        if pairing_determinant(maximal_minors(left), maximal_minors(right), n, a) != expected:
            return False, f"pairing mismatch on trial {trial}", 30
    identity = [[int(i == k) for k in range(4)] for i in range(4)]
    signs = [s for s, _ in laplace_terms(identity, (1, 2))]
    ok = signs == [1, -1, 1, 1, -1, 1]
    return ok, f"1000 matrices agree with the Leibniz oracle, n=4 signs {signs}", 30


# -- 4: angle lemmas at 128 bits -------------------------------------------------------


def criterion_4():
    rng = random.Random(4)
    pairs = 200
    failures = []
    with mpmath.workprec(128):
        for _ in range(pairs):
            n = rng.randint(3, 6)
            d = rng.randint(1, n - 1)
            e = rng.randint(1, n - d)
            a, b = random_subspace(n, d, rng), random_subspace(n, e, rng)
            psis = principal_angles(a, b).psis
            if list(psis) != sorted(psis):
                failures.append("ordering")
            value = phi(a, b)
            if abs(value.value - value.product) > TOL:
                failures.append("phi agreement")
            for j, p in enumerate(psis, start=1):
                if p < value.product ** (mpmath.mpf(1) / j) - TOL:
                    failures.append("phi lower bound")
            if a.d > 1:
                sub = RealSubspace.from_columns([a.column(k) for k in range(a.d - 1)])
                smaller = principal_angles(sub, b).psis
                if any(big > small + TOL for big, small in zip(psis, smaller)):
                    failures.append("inclusion")
            q = random_orthogonal(n, rng)
            moved = principal_angles(transform(a, q), transform(b, q)).psis
            if any(abs(x - y) > TOL for x, y in zip(psis, moved)):
                failures.append("isometry")
            x, y, z = ([mpmath.mpf(rng.gauss(0, 1)) for _ in range(n)] for _ in range(3))
            if vector_angle(x, z) > vector_angle(x, y) + vector_angle(y, z) + TOL:
                failures.append("triangle")
            ux = [v / mpmath.norm(x) for v in x]
            uy = [v / mpmath.norm(y) for v in y]
            dist = mpmath.norm([s - t for s, t in zip(ux, uy)])
            angle = vector_angle(ux, uy)
            if angle > dist + TOL:
                failures.append("upper vector bound")
            if mpmath.fdot(ux, uy) >= 0 and angle < dist / mpmath.sqrt(2) - TOL:
                failures.append("lower vector bound")
    return not failures, f"{pairs} pairs at tolerance 2^-96, failures: {sorted(set(failures)) or 'none'}", 120


# -- 5: mod-4 obstruction --------------------------------------------------------------


def criterion_5():
    brute = [t for t in product(range(4), repeat=3) if (t[1] ** 2 + t[2] ** 2 - 3 * t[0] ** 2) % 4 == 0]
    ok = brute == r4_mod4_residues() and r4_obstruction_holds() and all(x % 2 == 0 for t in brute for x in t)
    return ok, f"{len(brute)} admissible residue triples, all even", 1


# -- 6: frontier of the R^4 plane ------------------------------------------------------


def criterion_6():
    c = construct_r4(mpmath.sqrt(2), 128)
    result = frontier(c.subspace, 2, 1, EnumerationPlan(4, 2, 150), structure=c.structure)
    records = result.records
    with mpmath.workprec(128):
        positive = all(r.psi > 0 for r in records)
        fit = fit_exponent(records)
        scaled = [(r.height, r.psi * r.height ** mpmath.mpf(3.5)) for r in records]
        bottom = min(s for h, s in scaled if h <= 75)
        top = min((s for h, s in scaled if h > 75), default=None)
    steady = top is not None and top >= bottom
    ok = positive and 2.3 <= fit.beta <= 3.7 and steady
    return ok, f"{len(records)} records, fitted exponent {fit.beta:.3f}, min scaled top/bottom half steady: {steady}", 600


# -- 8, 9: spectrum --------------------------------------------------------------------


def _cf_record_denominators(x: Fraction, q_max: int, tau: Fraction):
    out = []
    for conv in continued_fraction_convergents(x, 10**6):
        q = conv.denominator
        if q > q_max:
            break
        if abs(x - conv) * Fraction(q) ** tau < 1 if tau.denominator == 1 else _beats(x, conv, tau):
            out.append(q)
    return out


def _beats(x, conv, tau):
    # |x - p/q| < q^-tau, with tau = a/b rational: compare (|x - p/q| q^a/b)^b < 1
    err = abs(x - conv)
    return (err ** tau.denominator) * Fraction(conv.denominator) ** tau.numerator < 1


def criterion_8():
    cfg = SpectrumConfig(1, Fraction(3))
    truncation = 7
    required = cfg.required_precision(truncation)
    bits = max(4096, required)
    state = spectrum_build(SpectrumConfig(1, Fraction(3), prec=bits), truncation)
    records = [state.record(N) for N in range(1, 7)]
    notes = []
    with mpmath.workprec(bits):
        if any(r.minors_gcd != 1 for r in records):
            notes.append("gcd")
        upper = height_upper_constant(1)
        ratios = [r.height_ratio for r in records]
        if not all(0 < h <= upper for h in ratios):
            notes.append("height range")
        later = ratios[1:]
        if max(later) / min(later) > 1 + mpmath.mpf(10) ** -6:
            notes.append("constant not stable")
        if any(abs(r.exponent - 3) > mpmath.mpf(0.06) for r in records[3:]):
            notes.append("exponent")
    top = Fraction(5) ** (3**6)
    found = _cf_record_denominators(state.xi_exact[0][0], top, Fraction(11, 4))
    expected = [5 ** (3**N) for N in range(1, 7)]
    if [q for q in found if q >= 5**3] != expected:
        notes.append("record denominators")
    detail = (f"precision {bits} bits (stated 4096, required {required}); "
              f"exponents N=4..6 {[mpmath.nstr(r.exponent, 6) for r in records[3:]]}; "
              f"c~ {mpmath.nstr(min(later), 8)}; problems: {notes or 'none'}")
    return not notes, detail, 120


def criterion_9():
    cfg = SpectrumConfig(2, Fraction(5, 2))
    truncation = 4
    required = cfg.required_precision(truncation)
    bits = max(8192, required)
    state = spectrum_build(SpectrumConfig(2, Fraction(5, 2), prec=bits), truncation)
    records = [state.record(N) for N in (1, 2, 3)]
    with mpmath.workprec(bits):
        gcd_ok = all(r.minors_gcd == 1 for r in records)
        steps = [b.scaled_psi / a.scaled_psi for a, b in zip(records, records[1:])]
        stable = all(mpmath.mpf(1) / 10 <= s <= 10 for s in steps)
    detail = (f"precision {bits} bits (stated 8192, required {required}); "
              f"consecutive psi_2 H^(5/2) ratios {[mpmath.nstr(s, 5) for s in steps]}")
    return gcd_ok and stable, detail, 600


# -- 7: R^5 construction ---------------------------------------------------------------


def criterion_7():
    c = construct_r5(2, 256)
    with mpmath.workprec(256):
        small = all(abs(r) < mpmath.mpf(10) ** -50 for r in c.residuals)
    roots = all(v != 0 for v in rational_root_values().values())
    empty = r5_obstruction_search(20) == []
    detail = f"residuals < 1e-50: {small}, P(+-1), P(+-1/2) nonzero: {roots}, bound-20 search empty: {empty}"
    return small and roots and empty, detail, 60


# -- 10: Dirichlet ---------------------------------------------------------------------


def _exact(x):
    sign, man, exp, _ = x._mpf_
    value = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -value if sign else value


def criterion_10():
    rng = random.Random(10)
    checked = cf = 0
    for _ in range(100):
        d = rng.randint(1, 3)
        with mpmath.workprec(128):
            x = [mpmath.sqrt(rng.randint(2, 400)) / rng.randint(1, 9) for _ in range(d)]
        Q = rng.randint(2, 10**4)
        result = dirichlet(x, Q, 128)
        error = certified_error(x, result.p, result.q, 128)
        if not meets_dirichlet_bound(error, result.q, d):
            return False, f"bound fails for d={d}, Q={Q}", 60
        checked += 1
        if d == 1:
            best = None
            for conv in continued_fraction_convergents(_exact(x[0]), 200):
                if conv.denominator > Q:
                    break
                best = conv
            if (result.p[0], result.q) != (best.numerator, best.denominator):
                return False, f"continued fraction mismatch at Q={Q}", 60
            cf += 1
    return True, f"{checked} targets certified, {cf} one-dimensional ones match continued fractions", 60


# -- 11: pipeline ----------------------------------------------------------------------


def criterion_11():
    F = random_subspace(5, 2, random.Random(0), prec=256)
    emissions = list(lower_bound_pipeline(F, 2, 2, geometric_schedule(10, 10**6)))
    with mpmath.workprec(128):
        certs = [e.certificate for e in emissions]
        ratio = max(certs) / min(certs) if certs and min(certs) > 0 else mpmath.inf
    beta_ok = all(e.beta == Fraction(5, 9) for e in emissions)
    ok = len(emissions) >= 5 and ratio <= 100 and beta_ok
    return ok, f"{len(emissions)} emissions, certificate max/min {mpmath.nstr(ratio, 4)}", 600


# -- 12: tables ------------------------------------------------------------------------


def criterion_12():
    rows = {(b.instance.n, b.instance.d, b.instance.e, b.instance.j): (b.lower, b.upper) for b in render_tables(6)}
    wrong = sorted(k for k in FIGURES if rows.get(k) != FIGURES[k])
    extra = sorted(set(rows) - set(FIGURES))
    ok = not wrong and not extra
    return ok, f"{len(FIGURES)} figure entries, mismatches {wrong or 'none'}, unexpected {extra or 'none'}", 1


# -- 13: replay determinism ------------------------------------------------------------

REPLAYS = {
    6: ["frontier", "--target", "r4", "--e", "2", "--hmax", "150"],
    8: ["construct", "spectrum", "--l", "1", "--beta", "3", "--N", "6", "--precision-bits", "4096"],
    11: ["construct", "pipeline", "--n", "5", "--d", "2", "--e", "2", "--j", "2", "--q-stop", "1000000",
         "--precision-bits", "256"],
}


def criterion_13():
    same = {}
    with tempfile.TemporaryDirectory() as tmp:
        for number, argv in REPLAYS.items():
            outputs = []
            for run, workers in enumerate(("1", "2")):
                path = os.path.join(tmp, f"c{number}-{run}.json")
                code = cli_main(argv + ["--format", "json", "--out", path, "--workers", workers])
                if code != 0:
                    return False, f"criterion {number} replay exited {code}", None
                with open(path, "rb") as fh:
                    outputs.append(fh.read())
            same[number] = outputs[0] == outputs[1]
    return all(same.values()), f"byte-identical replays: {same}", None


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
    7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11, 12: criterion_12,
    13: criterion_13,
}


def run_criterion(number):
    start = time.perf_counter()
    try:
        ok, detail, limit = CRITERIA[number]()
    except Exception as exc:  # noqa: BLE001 - a crash is reported as a failure line
        ok, detail, limit = False, f"raised {type(exc).__name__}: {exc}", None
    elapsed = time.perf_counter() - start
    in_time = limit is None or elapsed <= limit
    budget = "" if limit is None else f" / {limit} s"
    status = "PASS" if ok and in_time else "FAIL"
    line = f"criterion {number}: {status} ({elapsed:.1f} s{budget}) {detail}"
    print(line)
    return ok and in_time, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    from conftest import ACCEPTANCE_LINES

    ok, line = run_criterion(number)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


if __name__ == "__main__":
    chosen = [int(a) for a in sys.argv[1:]] or sorted(CRITERIA)
    results = [run_criterion(n)[0] for n in chosen]
    sys.exit(0 if all(results) else 1)
