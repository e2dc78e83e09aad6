"""Rational subspaces by height, best-approximation frontiers and exponent fits.

Exhaustive enumeration walks primitive integer vectors in the Plücker ball of
radius height_max, solving the innermost coordinate from the quadratic
relations instead of looping over it. Height shells [2^k, 2^(k+1)) are
independent and are merged by (height^2, plucker).

For a target of complementary dimension whose Plücker vector is R @ omega
(integer R, real omega), the pairing det(A | B) is omega . g with g an integer
linear image of the Plücker vector of B. Since psi_j >= phi^(1/j) and
phi = |det(A | B)| / (|w_A| H(B)), a subspace can only beat the current best
psi when |omega . g| is tiny, and the frontier search enumerates those g first.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import mpmath
import numpy as np

from . import __version__
from .angles import RealSubspace, as_real, principal_angles
from .exact_core import (
    PreconditionError,
    complement,
    content,
    ell,
    identity,
    index_position,
    index_sets,
    maximal_minors,
    transpose,
)
from .grassmann import RationalSubspace, from_basis, from_plucker, normalize_sign, plucker_relations
from .lattice import IntegerSolver, ellipsoid_points, lll_reduce
from .serialization import canonical_json, mpf_to_hex

DEFAULT_WORK_LIMIT = 10**8


class WorkLimitExceeded(RuntimeError):
    """Raised when a search exceeds its budget; carries what was finished."""

    def __init__(self, message: str, partial=(), progress: dict | None = None):
        super().__init__(message)
        self.partial = list(partial)
        self.progress = progress or {}


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class EnumerationPlan:
    n: int
    e: int
    height_max: Fraction
    strategy: str = "exhaustive"  # or "heuristic"
    work_limit: int = DEFAULT_WORK_LIMIT
    workers: int = 1
    effort: int = 8  # heuristic reduction levels

    def __post_init__(self):
        object.__setattr__(self, "height_max", _as_fraction(self.height_max))
        if not 1 <= self.e <= self.n - 1:
            raise PreconditionError(f"need 1 <= e <= n-1, got e={self.e}, n={self.n}")
        if self.n > 8:
            raise PreconditionError("enumeration is limited to n <= 8")
        if self.height_max < 1:
            raise PreconditionError("height_max must be at least 1")
        if self.strategy not in ("exhaustive", "heuristic"):
            raise PreconditionError(f"unknown strategy {self.strategy!r}")
        if self.work_limit < 1 or self.workers < 1 or self.effort < 0:
            raise PreconditionError("work_limit and workers must be positive, effort nonnegative")

    @property
    def height_sq_max(self) -> int:
        return math.floor(self.height_max * self.height_max)

    def shells(self):
        """Half-open ranges [lo, hi) of squared heights, one per dyadic height shell.

        The first shell holds exactly the height-1 (coordinate) subspaces.
        """
        top = self.height_sq_max
        out = [(1, 2)] if top >= 1 else []
        lo = 2
        while lo <= top:
            hi = min(lo * 4, top + 1)
            out.append((lo, hi))
            lo = hi
        return out

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "e": self.e,
            "height_max": str(self.height_max),
            "strategy": self.strategy,
            "work_limit": self.work_limit,
            "effort": self.effort,
        }


# -- innermost coordinate from the quadratic relations -------------------------------------


def _eval(relation, u):
    return sum(c * u[a] * u[b] for c, a, b in relation)


def _bilinear(relation, u, v):
    return sum(c * (u[a] * v[b] + v[a] * u[b]) for c, a, b in relation)


def _integer_roots(a: int, b: int, c: int, lo: int, hi: int):
    """Integers x in [lo, hi] with a x^2 + b x + c = 0; None means every x."""
    if a == 0:
        if b == 0:
            return None if c == 0 else []
        if c % b:
            return []
        x = -c // b
        return [x] if lo <= x <= hi else []
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    root = math.isqrt(disc)
    if root * root != disc:
        return []
    out = set()
    for s in (root, -root):
        num = -b + s
        if num % (2 * a) == 0:
            x = num // (2 * a)
            if lo <= x <= hi:
                out.add(x)
    return sorted(out)


class RelationSolver:
    """Solve the relations for t[0] along eta = offset + sum_k t[k] basis[k]."""

    def __init__(self, relations, offset, basis, work=None, limit=None):
        self.relations = list(relations)
        self.offset = list(offset)
        self.basis = [list(b) for b in basis]
        self.first = self.basis[0] if self.basis else None
        self.leading = [_eval(rel, self.first) for rel in self.relations] if self.first else []
        self.work = work
        self.limit = limit

    def point(self, t):
        eta = list(self.offset)
        for coef, vec in zip(t, self.basis):
            if coef:
                eta = [x + coef * y for x, y in zip(eta, vec)]
        return eta

    def __call__(self, t, lo, hi):
        if self.work is not None:
            self.work[0] += 1
            if self.limit is not None and self.work[0] > self.limit:
                raise WorkLimitExceeded(f"work limit {self.limit} exceeded")
        if lo > hi:
            return []
        u = self.point([0] + list(t[1:]))
        allowed = None
        for rel, lead in zip(self.relations, self.leading):
            roots = _integer_roots(lead, _bilinear(rel, u, self.first), _eval(rel, u), lo, hi)
            if roots is None:
                continue
            allowed = set(roots) if allowed is None else allowed & set(roots)
            if not allowed:
                return []
        if allowed is None:
            return range(lo, hi + 1)
        return sorted(allowed)


# -- exhaustive enumeration ---------------------------------------------------------------


def _is_canonical(eta) -> bool:
    lead = next((x for x in eta if x), 0)
    return lead > 0 and content(eta) == 1


def _full_shell(n: int, e: int, lo: int, hi: int, limit: int):
    """Every rational e-subspace with lo <= H^2 < hi, sorted by key, plus work used."""
    size = math.comb(n, e)
    relations = plucker_relations(e, n).relations if 1 < e < n - 1 else ()
    work = [0]
    basis = identity(size)
    solver = RelationSolver(relations, [0] * size, basis, work, limit)
    found = []
    for t in ellipsoid_points(basis, [0] * size, hi - 1, innermost=solver if relations else None, work=work):
        if work[0] > limit:
            raise WorkLimitExceeded(f"work limit {limit} exceeded")
        eta = list(t)
        norm = sum(x * x for x in eta)
        if not lo <= norm < hi or not _is_canonical(eta):
            continue
        if relations and any(_eval(rel, eta) for rel in relations):
            continue
        found.append(from_plucker(eta, e, n))
    found.sort(key=lambda s: s.key)
    return found, work[0]


def _run_shell(args):
    n, e, lo, hi, limit = args
    try:
        return "ok", _full_shell(n, e, lo, hi, limit)
    except WorkLimitExceeded as exc:
        return "limit", str(exc)


def enumerate_subspaces(plan: EnumerationPlan):
    """Yield rational subspaces with H <= height_max in (height^2, plucker) order."""
    if plan.strategy == "heuristic":
        raise PreconditionError("heuristic enumeration needs a target; use heuristic_search")
    shells = plan.shells()
    tasks = [(plan.n, plan.e, lo, hi, plan.work_limit) for lo, hi in shells]
    done = []
    spent = 0
    if plan.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            results = list(pool.map(_run_shell, tasks))
    else:
        results = (_run_shell(t) for t in tasks)
    for (lo, hi), (status, payload) in zip(shells, results):
        if status == "limit":
            raise WorkLimitExceeded(
                f"{payload} in height^2 shell [{lo}, {hi})",
                done,
                {"completed_height_sq": lo - 1, "work": spent},
            )
        spaces, used = payload
        spent += used
        if spent > plan.work_limit:
            raise WorkLimitExceeded(
                f"work limit {plan.work_limit} exceeded", done, {"completed_height_sq": lo - 1, "work": spent}
            )
        done.extend(spaces)
        yield from spaces


# -- frontier records --------------------------------------------------------------------


@dataclass(frozen=True)
class ApproximationRecord:
    subspace: RationalSubspace
    height: object
    psi: object
    j: int

    def csv_row(self):
        s = self.subspace
        return [s.n, s.e, self.j, str(s.height_squared), mpf_to_hex(self.psi), " ".join(map(str, s.plucker))]


CSV_HEADER = ["n", "e", "j", "height_sq", "psi_j", "plucker"]


@dataclass(frozen=True)
class Frontier:
    records: tuple
    plan: EnumerationPlan
    j: int
    prec: int
    label: str = "frontier"  # "lower-bound frontier" for heuristic scans
    complete: bool = True
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in self.records:
            writer.writerow(rec.csv_row())
        return out.getvalue()

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "complete": self.complete,
            "plan": self.plan.to_dict(),
            "j": self.j,
            "prec": self.prec,
            "version": __version__,
            "meta": self.meta,
            "records": [dict(zip(CSV_HEADER, rec.csv_row())) for rec in self.records],
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def records_from_csv(text: str):
    """(height_sq, psi) pairs from a frontier CSV, for fitting."""
    from .serialization import hex_to_mpf

    rows = list(csv.DictReader(io.StringIO(text)))
    return [(int(r["height_sq"]), hex_to_mpf(r["psi_j"])) for r in rows]


def _fold_records(candidates, best, j, prec):
    """Strictly improving records from (subspace, psi) pairs, given the best so far."""
    by_height: dict[int, list] = {}
    for space, value in candidates:
        by_height.setdefault(space.height_squared, []).append((value, space.plucker, space))
    records = []
    for h in sorted(by_height):
        value, _, space = min(by_height[h], key=lambda item: (item[0], item[1]))
        if best is None or value < best:
            best = value
            with mpmath.workprec(prec):
                records.append(ApproximationRecord(space, space.height(prec), value, j))
    return records, best


def _float_basis(target: RealSubspace):
    return np.array([[float(target.onb[i, k]) for k in range(target.d)] for i in range(target.n)])


def _float_psis(qa, space: RationalSubspace):
    qc, _ = np.linalg.qr(np.array(space.zbasis, dtype=float))
    small, big = (qa, qc) if qa.shape[1] <= qc.shape[1] else (qc, qa)
    residual = small - big @ (big.T @ small)
    return np.sort(np.linalg.svd(residual, compute_uv=False))


def _screen(target, qa, spaces, j, best, prec):
    """Exact psi_j for the spaces whose double-precision psi_j could beat best."""
    out = []
    for space in spaces:
        if best is not None:
            approx = _float_psis(qa, space)[j - 1]
            if approx > float(best) * (1 + 1e-6) + 1e-12:
                continue
        out.append((space, principal_angles(target, space, prec).psis[j - 1]))
    return out


def _check_frontier_args(target, e, j, plan):
    if plan.n != target.n or plan.e != e:
        raise PreconditionError("plan does not match the target's ambient dimension or e")
    if target.d + e > target.n:
        raise PreconditionError("need d + e <= n")
    if not 1 <= j <= min(target.d, e):
        raise PreconditionError(f"angle index {j} outside 1..{min(target.d, e)}")


def frontier(A, e: int, j: int, plan: EnumerationPlan, structure=None, prec: int | None = None) -> Frontier:
    """Best-approximation records of A by rational e-subspaces with H <= height_max.

    structure: optional PluckerStructure of A (complementary dimensions only),
    which enables the pruned search; otherwise every subspace is scored.
    """
    target = as_real(A, prec or getattr(A, "prec", 128))
    prec = target.prec
    _check_frontier_args(target, e, j, plan)
    if plan.strategy == "heuristic":
        return _heuristic_frontier(target, e, j, plan)
    if structure is not None:
        if target.d + e != target.n:
            raise PreconditionError("the pruned search needs complementary dimensions")
        return _pruned_frontier(target, e, j, plan, structure)
    qa = _float_basis(target)
    records, best = [], None
    stream = enumerate_subspaces(plan)
    shell_spaces: list = []
    current_shell = None
    shells = plan.shells()

    def shell_of(h):
        return next(i for i, (lo, hi) in enumerate(shells) if lo <= h < hi)

    try:
        for space in stream:
            idx = shell_of(space.height_squared)
            if idx != current_shell and shell_spaces:
                new, best = _fold_records(_screen(target, qa, shell_spaces, j, best, prec), best, j, prec)
                records.extend(new)
                shell_spaces = []
            current_shell = idx
            shell_spaces.append(space)
        if shell_spaces:
            new, best = _fold_records(_screen(target, qa, shell_spaces, j, best, prec), best, j, prec)
            records.extend(new)
    except WorkLimitExceeded as exc:
        raise WorkLimitExceeded(str(exc), records, exc.progress) from None
    return Frontier(tuple(records), plan, j, prec, meta={"search": "exhaustive"})


# -- pruned search for complementary dimensions -------------------------------------------


@dataclass(frozen=True)
class _PairingMap:
    """g = S eta with det(A | B) = omega . g for B with Plücker vector eta."""

    S: tuple  # m rows of length N
    omega: tuple  # mp values
    w_norm: object


def _pairing_map(structure, n: int, d: int, prec: int) -> _PairingMap:
    coeffs = [list(map(int, row)) for row in structure.coefficients]
    size = math.comb(n, d)
    if len(coeffs) != size:
        raise PreconditionError(f"structure must have C({n},{d}) = {size} rows")
    m = len(coeffs[0])
    position = index_position(n - d, n)
    S = [[0] * size for _ in range(m)]
    for i, rows in enumerate(index_sets(d, n)):
        sign = -1 if ell(rows, n) % 2 else 1
        target = position[complement(rows, n)]
        for k in range(m):
            S[k][target] += sign * coeffs[i][k]
    with mpmath.workprec(prec):
        omega = tuple(mpmath.mpf(v) for v in structure.values)
        w = [mpmath.fsum(c * v for c, v in zip(row, omega)) for row in coeffs]
        w_norm = mpmath.sqrt(mpmath.fsum(x * x for x in w))
    return _PairingMap(tuple(map(tuple, S)), omega, w_norm)


def _small_pairings(pm: _PairingMap, radius: float, eps: float, cap: int):
    """Integer g (within per-coordinate bounds) with |omega . g| <= eps, in lex order."""
    omega = np.array([float(x) for x in pm.omega])
    bounds = [int(math.floor(math.sqrt(sum(x * x for x in row)) * radius + 1e-9)) for row in pm.S]
    m = len(omega)
    pivot = int(np.argmax(np.abs(omega)))
    others = [k for k in range(m) if k != pivot]
    total = math.prod(2 * bounds[k] + 1 for k in others)
    if total > cap:
        raise WorkLimitExceeded(f"pairing box of {total} points exceeds the work limit")
    out = []
    if not others:
        grids = [np.zeros(1)]
        r = np.zeros(1)
    else:
        axes = [np.arange(-bounds[k], bounds[k] + 1, dtype=float) for k in others]
        mesh = np.meshgrid(*axes, indexing="ij")
        grids = [g.ravel() for g in mesh]
        r = sum(omega[k] * g for k, g in zip(others, grids))
    # rounding slack keeps the screen inclusive
    slack = eps * 1e-9 + 1e-12 * (np.abs(omega).sum() * radius * 4 + 1)
    lo = np.ceil((-eps - slack - r) / omega[pivot])
    hi = np.floor((eps + slack - r) / omega[pivot])
    lo = np.maximum(lo, -bounds[pivot])
    hi = np.minimum(hi, bounds[pivot])
    idx = np.nonzero(lo <= hi)[0]
    for i in idx:
        for value in range(int(lo[i]), int(hi[i]) + 1):
            g = [0] * m
            for k, grid in zip(others, grids):
                g[k] = int(grid[i])
            g[pivot] = value
            out.append(tuple(g))
    out.sort()
    return out, total


def _fibre_spaces(args):
    """Canonical Plücker vectors eta with S eta = g, lo <= |eta|^2 < hi, relations exact."""
    S, relations, e, n, gs, lo, hi, limit, eps_data = args
    solver = IntegerSolver(S)
    kernel = solver.kernel
    work = [0]
    found = []
    for g in gs:
        base = solver.particular(g)
        if base is None:
            continue
        inner = RelationSolver(relations, base, kernel, work, limit) if kernel and relations else None
        for t in ellipsoid_points(kernel, base, hi - 1, innermost=inner, work=work):
            if work[0] > limit:
                raise WorkLimitExceeded(f"work limit {limit} exceeded")
            eta = list(base)
            for coef, vec in zip(t, kernel):
                if coef:
                    eta = [x + coef * y for x, y in zip(eta, vec)]
            norm = sum(x * x for x in eta)
            if not lo <= norm < hi or not _is_canonical(eta):
                continue
            if any(_eval(rel, eta) for rel in relations):
                continue
            # phi screen with the actual height: |omega.g| < best^j |w_A| H
            if eps_data is not None:
                gval, scale = eps_data[0](g), eps_data[1]
                if gval * gval > scale * scale * norm:
                    continue
            found.append(tuple(eta))
    return found, work[0]


class _PhiBound:
    """Picklable |omega . g| evaluator in double precision (with slack)."""

    def __init__(self, omega):
        self.omega = [float(x) for x in omega]

    def __call__(self, g):
        value = abs(sum(o * x for o, x in zip(self.omega, g)))
        return max(value - 1e-9 * (1 + sum(abs(o * x) for o, x in zip(self.omega, g))), 0.0)


def _pruned_frontier(target, e, j, plan, structure) -> Frontier:
    n, d, prec = target.n, target.d, target.prec
    pm = _pairing_map(structure, n, d, prec)
    relations = plucker_relations(e, n).relations if 1 < e < n - 1 else ()
    S = [list(r) for r in pm.S]
    qa = _float_basis(target)
    records, best = [], None
    work_total = 0
    stats = []
    phi_bound = _PhiBound(pm.omega)
    for lo, hi in plan.shells():
        radius = math.sqrt(hi - 1)
        if best is None:
            eps = float("inf")
            scale = None
        else:
            with mpmath.workprec(prec):
                scale_mp = best**j * pm.w_norm
            scale = float(scale_mp) * (1 + 1e-9)
            eps = scale * radius
        try:
            budget = plan.work_limit - work_total
            if eps == float("inf"):
                gs = None
                box = 0
            else:
                gs, box = _small_pairings(pm, radius, eps, budget)
            work_total += box
            if gs is None:
                etas, used = _fibre_all(n, e, lo, hi, budget)
            else:
                etas, used = _fibres(S, relations, e, n, gs, lo, hi, budget, (phi_bound, scale), plan.workers)
            work_total += used
            if work_total > plan.work_limit:
                raise WorkLimitExceeded(f"work limit {plan.work_limit} exceeded")
        except WorkLimitExceeded as exc:
            raise WorkLimitExceeded(
                str(exc), records, {"completed_height_sq": lo - 1, "work": work_total}
            ) from None
        spaces = sorted((from_plucker(list(eta), e, n) for eta in set(etas)), key=lambda s: s.key)
        scored = _screen(target, qa, spaces, j, best, prec)
        new, best = _fold_records(scored, best, j, prec)
        records.extend(new)
        stats.append({"shell": [lo, hi], "pairings": None if gs is None else len(gs), "candidates": len(spaces)})
    return Frontier(tuple(records), plan, j, prec, meta={"search": "pruned", "work": work_total, "shells": stats})


def _fibre_all(n, e, lo, hi, limit):
    spaces, used = _full_shell(n, e, lo, hi, limit)
    return [s.plucker for s in spaces], used


def _fibres(S, relations, e, n, gs, lo, hi, limit, eps_data, workers):
    if workers > 1 and len(gs) > 1:
        chunks = [gs[i::workers] for i in range(workers)]
        tasks = [(S, relations, e, n, c, lo, hi, limit, eps_data) for c in chunks]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_fibre_spaces, tasks))
        etas = [eta for found, _ in results for eta in found]
        return etas, sum(used for _, used in results)
    return _fibre_spaces((S, relations, e, n, gs, lo, hi, limit, eps_data))


# -- heuristic search ----------------------------------------------------------------------


def _orthogonal_complement(target: RealSubspace):
    """Orthonormal basis of A^perp (n x (n-d)) in double precision."""
    qa = _float_basis(target)
    full, _ = np.linalg.qr(np.hstack([qa, np.eye(target.n)]))
    return full[:, target.d:target.n]


def coordinate_subspaces(n: int, e: int):
    out = []
    for cols in index_sets(e, n):
        out.append(from_basis([[int(i + 1 == c) for c in cols] for i in range(n)]))
    return out


def _pairing_functional(target: RealSubspace, e: int):
    """Coefficients c with det(A | B) = c . eta for B of complementary dimension."""
    n, d = target.n, target.d
    with mpmath.workprec(target.prec):
        rows = [[target.onb[i, k] for k in range(d)] for i in range(n)]
        w = maximal_minors(rows)
    position = index_position(e, n)
    coef = [0.0] * math.comb(n, e)
    for i, subset in enumerate(index_sets(d, n)):
        sign = -1 if ell(subset, n) % 2 else 1
        coef[position[complement(subset, n)]] = sign * float(w[i])
    return coef


def _plucker_lattice_candidates(target, e, effort, limit, node_budget):
    """Decomposable eta that are short in the lattice weighted by the pairing."""
    n = target.n
    size = math.comb(n, e)
    relations = plucker_relations(e, n).relations if 1 < e < n - 1 else ()
    coef = _pairing_functional(target, e)
    found = set()
    for level in range(1, effort + 1):
        scale = 4.0**level
        rows = [[int(i == k) for k in range(size)] + [int(round(scale * coef[i]))] for i in range(size)]
        reduced = lll_reduce(rows)
        heads = [row[:size] for row in reduced]
        ceiling = 2 * limit if limit is not None else None
        radius_sq = 4 * max(sum(x * x for x in row) for row in reduced)
        # widen the ball until the node budget or the height cap stops it
        while True:
            if ceiling is not None:
                radius_sq = min(radius_sq, ceiling)
            work = [0]
            solver = RelationSolver(relations, [0] * size, heads, work, node_budget) if relations else None
            exhausted = False
            try:
                for t in ellipsoid_points(reduced, [0] * (size + 1), radius_sq, innermost=solver, work=work):
                    if work[0] > node_budget:
                        exhausted = True
                        break
                    eta = [sum(c * h[k] for c, h in zip(t, heads)) for k in range(size)]
                    if not any(eta):
                        continue
                    eta = list(normalize_sign(eta))
                    if relations and any(_eval(rel, eta) for rel in relations):
                        continue
                    if limit is not None and sum(x * x for x in eta) > limit:
                        continue
                    found.add(tuple(eta))
            except WorkLimitExceeded:
                exhausted = True
            if exhausted or (ceiling is not None and radius_sq >= ceiling):
                break
            radius_sq *= 4
    return [from_plucker(list(eta), e, n) for eta in sorted(found)]


def _vector_candidates(target, e, effort, limit):
    """Subspaces spanned by e-subsets of integer vectors close to A."""
    n = target.n
    perp = _orthogonal_complement(target)
    vectors = []
    seen_vectors = set()
    for level in range(1, effort + 1):
        scale = 2.0**level
        rows = []
        for i in range(n):
            tail = [int(round(scale * x)) for x in perp[i]]
            rows.append([int(i == k) for k in range(n)] + tail)
        for row in lll_reduce(rows):
            v = normalize_sign(row[:n])
            if any(v) and v not in seen_vectors:
                seen_vectors.add(v)
                vectors.append(v)
    out = []
    for combo in combinations(vectors, e):
        matrix = transpose([list(v) for v in combo])
        if not any(maximal_minors(matrix)):
            continue
        space = from_basis(matrix)
        if limit is None or space.height_squared <= limit:
            out.append(space)
    return out


def heuristic_search(A, e: int, j: int, effort: int, height_max=None, prec: int | None = None,
                     node_budget: int | None = None):
    """Candidate (subspace, psi_j) pairs from reduced lattices; completeness is not claimed.

    For complementary dimensions, det(A | B) is a linear form in the Plücker
    vector eta of B, so at level k the lattice of eta weighted by 4^k times that
    form is LLL-reduced and its short decomposable points are collected.
    Otherwise, at level k the rows [e_i | round(2^k P^T e_i)], with P an
    orthonormal basis of the complement of A, are reduced and every e-subset
    of the short vectors spans a candidate. Coordinate subspaces are always
    included. Each reduced lattice is searched until node_budget nodes have
    been visited (default 6250 per unit of effort).
    """
    target = as_real(A, prec or getattr(A, "prec", 128))
    prec = target.prec
    n = target.n
    if not 1 <= j <= min(target.d, e) or not 1 <= e <= n - 1:
        raise PreconditionError("invalid e or j for this target")
    if effort < 0:
        raise PreconditionError("effort must be nonnegative")
    limit = None if height_max is None else math.floor(_as_fraction(height_max) ** 2)
    spaces = {s.plucker: s for s in coordinate_subspaces(n, e)}
    if target.d + e == n:
        budget = node_budget if node_budget is not None else 6250 * max(effort, 1)
        extra = _plucker_lattice_candidates(target, e, effort, limit, budget)
    else:
        extra = _vector_candidates(target, e, effort, limit)
    for space in extra:
        spaces.setdefault(space.plucker, space)
    ordered = sorted(spaces.values(), key=lambda s: s.key)
    return [(s, principal_angles(target, s, prec).psis[j - 1]) for s in ordered]


def _heuristic_frontier(target, e, j, plan) -> Frontier:
    found = heuristic_search(target, e, j, plan.effort, plan.height_max, target.prec)
    records, _ = _fold_records(found, None, j, target.prec)
    return Frontier(
        tuple(records),
        plan,
        j,
        target.prec,
        label="lower-bound frontier",
        complete=False,
        meta={"search": "heuristic", "candidates": len(found), "note": "incomplete: records may be missing"},
    )


# -- exponent fits -------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentFit:
    beta: float
    records_used: int
    residual: float  # root mean square of the log residuals
    height_range: tuple
    min_scaled: object  # min over records of psi * H^beta

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "records_used": self.records_used,
            "residual": self.residual,
            "height_range": [mpf_to_hex(h) for h in self.height_range],
            "min_scaled": mpf_to_hex(self.min_scaled),
        }


def fit_exponent(records) -> ExponentFit:
    """Negated least-squares slope of log psi against log H.

    records: ApproximationRecords or (height, psi) pairs.
    """
    pairs = []
    for rec in records:
        h, p = (rec.height, rec.psi) if isinstance(rec, ApproximationRecord) else rec
        pairs.append((mpmath.mpf(h), mpmath.mpf(p)))
    usable = [(h, p) for h, p in pairs if p > 0 and h > 0]
    if len(usable) < 3:
        raise PreconditionError(f"need at least 3 records with psi > 0, got {len(usable)}")
    x = np.array([float(mpmath.log(h)) for h, _ in usable])
    y = np.array([float(mpmath.log(p)) for _, p in usable])
    if np.ptp(x) == 0:
        raise PreconditionError("all records share one height; the slope is undefined")
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    beta = float(-slope)
    min_scaled = min(p * h ** mpmath.mpf(beta) for h, p in usable)
    heights = [h for h, _ in usable]
    return ExponentFit(beta, len(usable), residual, (min(heights), max(heights)), min_scaled)
