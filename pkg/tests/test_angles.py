import math
import random

import mpmath
import numpy as np
import pytest

from subspace_approx.angles import (
    PrecisionError,
    RealSubspace,
    intersection_dimension,
    phi,
    phi_complementary,
    principal_angles,
    project_onto,
    psi,
    random_orthogonal,
    random_subspace,
    transform,
    vector_angle,
)
from subspace_approx.constructions.r4 import construct_r4
from subspace_approx.exact_core import PreconditionError
from subspace_approx.grassmann import from_basis

SQRT_HALF = math.sqrt(2) / 2
TOL = 1e-30


@pytest.fixture(autouse=True)
def working_precision():
    # comparisons against 1e-25 need more than the 53-bit mpmath default
    with mpmath.workprec(128):
        yield


def grid_angles(a_cols, b_cols, steps=20000):
    """Min and max over unit x in a 2-dim A of sin(x, B), by sampling the circle."""
    qa, _ = np.linalg.qr(np.array(a_cols, dtype=float).T)
    qb, _ = np.linalg.qr(np.array(b_cols, dtype=float).T)
    theta = np.linspace(0, np.pi, steps)
    xs = np.outer(np.cos(theta), qa[:, 0]) + np.outer(np.sin(theta), qa[:, 1])
    residual = xs - (xs @ qb) @ qb.T
    dist = np.linalg.norm(residual, axis=1)
    return dist.min(), dist.max()


def test_vector_angle_examples():
    assert vector_angle([1, 0], [1, 0]) == 0
    assert float(vector_angle([1, 0], [1, 1])) == pytest.approx(SQRT_HALF, abs=1e-15)
    assert vector_angle([1, 0], [0, 1]) == 1
    with pytest.raises(PreconditionError):
        vector_angle([0, 0], [1, 0])


def test_vector_angle_is_accurate_for_tiny_angles():
    with mpmath.workprec(256):
        eps = mpmath.mpf(2) ** -100
        value = vector_angle([1, 0], [1, eps], 256)
        assert abs(value - eps) < eps * mpmath.mpf(2) ** -150


def test_identical_and_orthogonal_planes():
    a = RealSubspace.from_columns([[1, 0, 0, 0], [0, 1, 0, 0]])
    assert all(p == 0 for p in principal_angles(a, a).psis) or max(principal_angles(a, a).psis) < TOL
    b = RealSubspace.from_columns([[0, 0, 1, 0], [0, 0, 0, 1]])
    assert [float(p) for p in principal_angles(a, b).psis] == [1.0, 1.0]


def test_plane_example_as_printed():
    # (1,1,0,0) lies in span(e1, e2), so the first angle vanishes
    a = [[1, 0, 0, 0], [0, 1, 0, 0]]
    b = [[1, 1, 0, 0], [0, 0, 1, 0]]
    profile = principal_angles(RealSubspace.from_columns(a), RealSubspace.from_columns(b))
    low, high = grid_angles(a, b)
    # sampling resolves a vanishing angle only to about pi / steps
    assert float(profile.psis[0]) == pytest.approx(low, abs=1e-3)
    assert float(profile.psis[1]) == pytest.approx(high, abs=1e-6)
    assert profile.psis[0] < TOL and float(profile.psis[1]) == pytest.approx(1.0)


def test_plane_example_with_tilted_vector():
    a = [[1, 0, 0, 0], [0, 1, 0, 0]]
    b = [[1, 0, 0, 1], [0, 0, 1, 0]]
    profile = principal_angles(RealSubspace.from_columns(a), RealSubspace.from_columns(b))
    low, high = grid_angles(a, b)
    assert float(profile.psis[0]) == pytest.approx(low, abs=1e-6)
    assert float(profile.psis[1]) == pytest.approx(high, abs=1e-6)
    with mpmath.workprec(128):
        assert abs(profile.psis[0] - mpmath.sqrt(2) / 2) < TOL
        assert abs(profile.psis[1] - 1) < TOL


def test_random_profiles_match_grid_oracle():
    rng = random.Random(3)
    for _ in range(10):
        a = [[rng.gauss(0, 1) for _ in range(4)] for _ in range(2)]
        b = [[rng.gauss(0, 1) for _ in range(4)] for _ in range(2)]
        profile = principal_angles(RealSubspace.from_columns(a), RealSubspace.from_columns(b))
        low, high = grid_angles(a, b)
        assert float(profile.psis[0]) == pytest.approx(low, abs=1e-6)
        assert float(profile.psis[1]) == pytest.approx(high, abs=1e-6)


def test_witness_pairs_are_canonical():
    rng = random.Random(4)
    a, b = random_subspace(5, 2, rng), random_subspace(5, 3, rng)
    profile = principal_angles(a, b)
    with mpmath.workprec(128):
        for i, (x, _) in enumerate(profile.witnesses):
            for k, (_, y) in enumerate(profile.witnesses):
                dot = mpmath.fsum(p * q for p, q in zip(x, y))
                if i == k:
                    assert abs(dot * dot + profile.psis[i] ** 2 - 1) < 1e-25
                else:
                    assert abs(dot) < 1e-25


def test_precision_error_names_required_bits():
    a = RealSubspace.from_columns([[1, 0, 0]])
    with pytest.raises(PrecisionError) as info:
        principal_angles(a, a, 64, tolerance=mpmath.mpf(2) ** -200)
    assert info.value.required_bits >= 200


def test_phi_examples():
    a = RealSubspace.from_columns([[1, 0, 0, 0], [0, 1, 0, 0]])
    b = RealSubspace.from_columns([[0, 0, 1, 0], [0, 0, 0, 1]])
    assert phi(a, b).value == pytest.approx(1)
    c = RealSubspace.from_columns([[1, 1, 0, 0], [0, 0, 1, 0]])
    assert phi(a, c).value < TOL


def test_phi_formulas_agree_on_random_pairs():
    rng = random.Random(9)
    for _ in range(20):
        d = rng.randint(1, 3)
        e = rng.randint(1, 5 - d)
        a, b = random_subspace(5, d, rng), random_subspace(5, e, rng)
        value = phi(a, b)
        assert abs(value.value - value.product) < 1e-25


def test_phi_complementary_examples():
    a = RealSubspace.from_columns([[1, 0, 0, 0], [0, 1, 0, 0]])
    assert phi_complementary(a, from_basis([[0, 0], [0, 0], [1, 0], [0, 1]])) == pytest.approx(1)
    contains = from_basis([[1, 0], [0, 0], [0, 1], [0, 0]])
    assert phi_complementary(a, contains) < TOL
    target = construct_r4(mpmath.sqrt(2), 128).subspace
    plane = from_basis([[1, 0], [0, 1], [0, 0], [0, 0]])
    assert abs(phi_complementary(target, plane) - phi(target, plane).value) < 1e-20
    with pytest.raises(PreconditionError):
        phi_complementary(a, from_basis([[1], [0], [0], [0]]))


def test_projection_examples():
    f = RealSubspace.from_columns([[1, 0]])
    proj, angle = project_onto(f, [3, 0])
    assert angle == 0
    _, angle = project_onto(f, [1, 1])
    assert float(angle) == pytest.approx(SQRT_HALF)
    with pytest.raises(PreconditionError):
        project_onto(f, [0, 1])


def test_projection_matches_first_angle():
    rng = random.Random(12)
    for _ in range(10):
        f = random_subspace(5, 2, rng)
        x = [rng.gauss(0, 1) for _ in range(5)]
        _, angle = project_onto(f, x)
        line = RealSubspace.from_columns([x])
        assert abs(psi(line, f, 1) - angle) < 1e-25


def _random_pairs(count, seed):
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(3, 6)
        d = rng.randint(1, n - 1)
        e = rng.randint(1, n - 1)
        yield rng, n, random_subspace(n, d, rng), random_subspace(n, e, rng)


def test_ordering_and_phi_lower_bound():
    for _, _, a, b in _random_pairs(30, 21):
        profile = principal_angles(a, b)
        assert all(0 <= p <= 1 for p in profile.psis)
        assert list(profile.psis) == sorted(profile.psis)
        if a.d + b.d <= a.n:
            value = phi(a, b).value
            for j, p in enumerate(profile.psis, start=1):
                assert p >= value ** (mpmath.mpf(1) / j) - 1e-25


def test_inclusion_monotonicity():
    for rng, n, a, b in _random_pairs(20, 22):
        a_sub = RealSubspace.from_columns([a.column(k) for k in range(max(1, a.d - 1))])
        b_sub = RealSubspace.from_columns([b.column(k) for k in range(max(1, b.d - 1))])
        big = principal_angles(a, b).psis
        small = principal_angles(a_sub, b_sub).psis
        for j in range(min(a_sub.d, b_sub.d)):
            assert big[j] <= small[j] + 1e-25


def test_vector_transfer_to_last_angle():
    rng = random.Random(23)
    for _ in range(15):
        n = rng.randint(3, 6)
        d = rng.randint(1, n - 1)
        e = rng.randint(d, n - 1)
        a, b = random_subspace(n, d, rng), random_subspace(n, e, rng)
        top = psi(a, b, d)
        for _ in range(5):
            coef = [rng.gauss(0, 1) for _ in range(d)]
            x = [sum(c * a.onb[i, k] for k, c in enumerate(coef)) for i in range(n)]
            assert psi(RealSubspace.from_columns([x]), b, 1) <= top + 1e-25


def test_vector_triangle_and_two_sided_bounds():
    rng = random.Random(24)
    for _ in range(200):
        n = rng.randint(2, 5)
        x, y, z = ([rng.gauss(0, 1) for _ in range(n)] for _ in range(3))
        assert vector_angle(x, z) <= vector_angle(x, y) + vector_angle(y, z) + 1e-25
        diff = math.dist(x, y) / math.hypot(*x)
        assert float(vector_angle(x, y)) <= diff + 1e-12
        ux = [v / math.hypot(*x) for v in x]
        uy = [v / math.hypot(*y) for v in y]
        if sum(a * b for a, b in zip(ux, uy)) >= 0:
            assert float(vector_angle(ux, uy)) >= SQRT_HALF * math.dist(ux, uy) - 1e-12


def test_isometry_invariance():
    for rng, n, a, b in _random_pairs(10, 25):
        q = random_orthogonal(n, rng)
        before = principal_angles(a, b).psis
        after = principal_angles(transform(a, q), transform(b, q)).psis
        for p, r in zip(before, after):
            assert abs(p - r) < 1e-25


def test_intersection_detection():
    rng = random.Random(26)
    for k in range(0, 3):
        shared = [[rng.gauss(0, 1) for _ in range(6)] for _ in range(k)]
        a = RealSubspace.from_columns(shared + [[rng.gauss(0, 1) for _ in range(6)] for _ in range(3 - k)])
        b = RealSubspace.from_columns(shared + [[rng.gauss(0, 1) for _ in range(6)] for _ in range(3 - k)])
        assert intersection_dimension(principal_angles(a, b)) == k
    r1 = from_basis([[1, 0], [0, 1], [1, 1], [0, 0]])
    r2 = from_basis([[1, 0], [0, 0], [1, 0], [0, 1]])
    profile = principal_angles(r1, r2)
    assert profile.exact_zeros == 1 and profile.psis[0] == 0
    assert intersection_dimension(profile) == 1


def test_orthonormality_invariant():
    rng = random.Random(27)
    space = random_subspace(6, 3, rng, prec=200)
    assert space.orthonormality_defect() < mpmath.mpf(2) ** (16 - 200)
