"""Explicit rational approximants realizing the generic lower bound, and Going-up.

The pipeline picks an orthonormal family f_1..f_j in F where f_l vanishes on the
last d - l coordinates, approximates all remaining coordinates at once with a
common denominator q, and spans the rounded vectors. Going-up then adds one
short integer vector at a time until the requested dimension is reached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from ..angles import RealSubspace, as_real, principal_angles
from ..bounds import ProblemInstance, laurent_transfer, premiere_borne
from ..exact_core import PreconditionError, integer_kernel, matmul, transpose
from ..grassmann import RationalSubspace, from_basis
from ..lattice import IntegerSolver, ellipsoid_points
from ..serialization import mpf_to_hex
from .dirichlet import dirichlet


class CandidateNotFound(RuntimeError):
    """No extension fits inside the height budget."""


def _log_ratio(psi, height):
    if psi <= 0 or height <= 1:
        return mpmath.inf
    return -mpmath.log(psi) / mpmath.log(height)


def _height_within(height_sq_c: int, height_sq_b: int, budget: Fraction, codim: int) -> bool:
    """H(C) <= budget * H(B)^((codim-1)/codim), decided exactly."""
    return (Fraction(height_sq_c) / (budget * budget)) ** codim <= Fraction(height_sq_b) ** (codim - 1)


@dataclass(frozen=True)
class GoingUpResult:
    subspace: RationalSubspace
    psi: object  # psi_j(A, C)
    height_bound: object  # budget * H(B)^((n-e-1)/(n-e))
    exponent_before: object
    exponent_after: object
    transfer_held: bool  # measured exponent of C reaches the transferred one
    candidates: int


def going_up_search(A, B: RationalSubspace, j: int = 1, budget=4, prec: int | None = None) -> GoingUpResult:
    """Best C = B + span(v) for psi_j(A, .) among candidates of bounded height.

    Writing v through y = K v, where the rows of K span the integer vectors
    orthogonal to B, gives H(C)^2 = H(B)^2 * y^T (K K^T)^{-1} y, so the search
    is a lattice-point enumeration in an ellipsoid of dimension n - e.
    """
    A = as_real(A, prec or getattr(A, "prec", 128))
    prec = A.prec
    n, e = B.n, B.e
    if A.n != n:
        raise PreconditionError("subspaces live in different ambient spaces")
    if e + 1 > n - A.d:
        raise PreconditionError(f"going up needs e + 1 <= n - d, got e={e}, d={A.d}, n={n}")
    if not 1 <= j <= min(A.d, e):
        raise PreconditionError(f"angle index {j} outside 1..{min(A.d, e)}")
    budget = Fraction(budget)
    if budget <= 0:
        raise PreconditionError("budget must be positive")
    codim = n - e
    kernel = integer_kernel(B.columns(), n)
    gram = [[sum(Fraction(a * b) for a, b in zip(r1, r2)) for r2 in kernel] for r1 in kernel]
    inverse = _inverse(gram)
    # dual basis vectors: their Gram matrix is inverse(gram)
    dual = matmul(inverse, kernel)
    with mpmath.workprec(64):
        radius_sq = budget * budget * mpmath.mpf(B.height_squared) ** (mpmath.mpf(-1) / codim)
        radius_sq = float(radius_sq) * (1 + 1e-9)
    solver = IntegerSolver(kernel)
    qa = np.array([[float(A.onb[i, k]) for k in range(A.d)] for i in range(n)])
    seen = set()
    scored = []
    basis_cols = B.columns()
    for t in ellipsoid_points([[float(x) for x in row] for row in dual], [0] * n, radius_sq):
        lead = next((x for x in t if x), 0)
        if lead <= 0:
            continue  # skips zero and the negative of every candidate
        v = solver.particular(list(t))
        if v is None:
            raise AssertionError("projection lattice lift failed")
        candidate = from_basis(transpose(basis_cols + [v]))
        if candidate.plucker in seen:
            continue
        seen.add(candidate.plucker)
        if not _height_within(candidate.height_squared, B.height_squared, budget, codim):
            continue
        scored.append((_float_psi(qa, candidate.columns(), j), candidate))
    if not scored:
        raise CandidateNotFound(f"no extension of height <= {float(budget)} * H(B)^({codim - 1}/{codim})")
    # double precision ranks the candidates; the shortlist is rescored at full precision
    cutoff = min(s for s, _ in scored) * (1 + 1e-6) + 1e-12
    best = None
    for score, candidate in scored:
        if score > cutoff:
            continue
        value = principal_angles(A, candidate, prec).psis[j - 1]
        key = (value, candidate.key)
        if best is None or key < best[0]:
            best = (key, candidate, value)
    _, space, value = best
    with mpmath.workprec(prec):
        before_psi = principal_angles(A, B, prec).psis[j - 1]
        before = _log_ratio(before_psi, B.height(prec))
        after = _log_ratio(value, space.height(prec))
        bound = budget.numerator * B.height(prec) ** (mpmath.mpf(codim - 1) / codim) / budget.denominator
        if before == mpmath.inf or codim < 2:
            held = False
        else:
            target = mpmath.mpf(codim) * before / (codim - 1)
            held = bool(after >= target)
    return GoingUpResult(space, value, bound, before, after, held, len(seen))


def _float_psi(qa, columns, j: int) -> float:
    qc, _ = np.linalg.qr(np.array(columns, dtype=float).T)
    if qa.shape[1] > qc.shape[1]:
        qa, qc = qc, qa
    residual = qa - qc @ (qc.T @ qa)
    sines = np.sort(np.linalg.svd(residual, compute_uv=False))
    return float(sines[j - 1])


def _inverse(matrix):
    size = len(matrix)
    work = [list(map(Fraction, row)) + [Fraction(int(i == k)) for k in range(size)] for i, row in enumerate(matrix)]
    for c in range(size):
        pivot = next(r for r in range(c, size) if work[r][c] != 0)
        work[c], work[pivot] = work[pivot], work[c]
        scale = work[c][c]
        work[c] = [x / scale for x in work[c]]
        for r in range(size):
            if r != c and work[r][c]:
                f = work[r][c]
                work[r] = [a - f * b for a, b in zip(work[r], work[c])]
    return [row[size:] for row in work]


def zero_coordinate_family(F: RealSubspace, j: int):
    """Orthonormal f_1..f_j in F with f_l vanishing on the last d - l coordinates."""
    n, d, prec = F.n, F.d, F.prec
    if not 1 <= j <= d:
        raise PreconditionError(f"need 1 <= j <= d, got j={j}, d={d}")
    family = []
    with mpmath.workprec(prec):
        q = F.onb
        tiny = mpmath.mpf(2) ** (32 - prec)
        for level in range(1, j + 1):
            # constraints on the coefficient vector c in R^d (f = q c)
            rows = [[q[i, k] for k in range(d)] for i in range(n - (d - level), n)]
            for f in family:
                rows.append([mpmath.fsum(f[i] * q[i, k] for i in range(n)) for k in range(d)])
            ortho = []
            for row in rows:
                w = list(row)
                for _ in range(2):
                    for u in ortho:
                        coef = mpmath.fsum(a * b for a, b in zip(w, u))
                        w = [a - coef * b for a, b in zip(w, u)]
                norm = mpmath.sqrt(mpmath.fsum(x * x for x in w))
                if norm > tiny:
                    ortho.append([x / norm for x in w])
            best = None
            for k in range(d):
                w = [mpmath.mpf(int(i == k)) for i in range(d)]
                for _ in range(2):
                    for u in ortho:
                        coef = mpmath.fsum(a * b for a, b in zip(w, u))
                        w = [a - coef * b for a, b in zip(w, u)]
                norm = mpmath.sqrt(mpmath.fsum(x * x for x in w))
                if best is None or norm > best[0]:
                    best = (norm, w)
            if best[0] <= tiny:
                raise AssertionError("no vector of F satisfies the zero-coordinate constraints")
            c = [x / best[0] for x in best[1]]
            f = [mpmath.fsum(q[i, k] * c[k] for k in range(d)) for i in range(n)]
            for i in range(n - (d - level), n):
                f[i] = mpmath.mpf(0)
            norm = mpmath.sqrt(mpmath.fsum(x * x for x in f))
            f = [x / norm for x in f]
            lead = next(x for x in f if abs(x) > tiny)
            if lead < 0:
                f = [-x for x in f]
            family.append(f)
    return family


def geometric_schedule(start: int, stop: int, ratio: float = math.sqrt(10)):
    """Integers start, start*ratio, ... up to stop, rounded and deduplicated."""
    if start < 1 or stop < start or ratio <= 1:
        raise PreconditionError("need 1 <= start <= stop and ratio > 1")
    out = []
    value = float(start)
    while value <= stop * (1 + 1e-12):
        q = int(round(value))
        if not out or q > out[-1]:
            out.append(q)
        value *= ratio
    return out


@dataclass(frozen=True)
class PipelineEmission:
    Q: int
    q: int
    subspace: RationalSubspace = field(repr=False)
    psi: object
    height: object
    beta: Fraction
    certificate: object  # psi * H^beta
    dirichlet_error: Fraction = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "Q": self.Q,
            "q": self.q,
            "plucker": [str(x) for x in self.subspace.plucker],
            "height_squared": str(self.subspace.height_squared),
            "psi": mpf_to_hex(self.psi),
            "beta": str(self.beta),
            "certificate": mpf_to_hex(self.certificate),
        }


def stacked_coordinates(F: RealSubspace, j: int):
    """The nonzero coordinates of the zero-coordinate family, concatenated."""
    family = zero_coordinate_family(F, j)
    n, d = F.n, F.d
    x = []
    for level, f in enumerate(family, start=1):
        x.extend(f[: n - d + level])
    return family, x


def lower_bound_pipeline(F: RealSubspace, e: int, j: int, q_schedule, budget=4):
    """Yield one emission per new approximant C of dimension e, in schedule order."""
    n, d, prec = F.n, F.d, F.prec
    inst = ProblemInstance(n, d, e, j)
    beta = premiere_borne(inst) if n >= 4 else _small_n_value(inst)
    _, x = stacked_coordinates(F, j)
    previous = None
    for Q in q_schedule:
        found = dirichlet(x, int(Q), prec)
        vectors, offset = [], 0
        for level in range(1, j + 1):
            width = n - d + level
            vectors.append(list(found.p[offset:offset + width]) + [0] * (d - level))
            offset += width
        try:
            space = from_basis(transpose(vectors))
        except PreconditionError:
            continue  # rounded vectors collapsed; a larger Q separates them
        while space.e < e:
            space = going_up_search(F, space, j, budget, prec).subspace
        if previous is not None and space.plucker == previous:
            continue
        previous = space.plucker
        with mpmath.workprec(prec):
            value = principal_angles(F, space, prec).psis[j - 1]
            height = space.height(prec)
            cert = value * height ** (mpmath.mpf(beta.numerator) / beta.denominator)
        yield PipelineEmission(int(Q), found.q, space, value, height, beta, cert, found.error)


def _small_n_value(inst: ProblemInstance) -> Fraction:
    """The same construction's exponent when the closed form is not stated (n < 4)."""
    n, d, e, j = inst.n, inst.d, inst.e, inst.j
    size = j * (n - d) + j * (j + 1) // 2
    value = Fraction(size + 1, j * size)
    for k in range(j, e):
        value = laurent_transfer(value, n, k, "up")
    return value
