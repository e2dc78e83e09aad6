"""Subspaces of R^{2l} with a prescribed approximation exponent.

The entries xi_ij = sum_k e_k / theta^{a_k} of an l x l matrix M define
A = span [I; M]; its best approximants are B_N = span [theta^{a_N} I; F_N].
With a_k = floor(alpha^k), alpha = l * beta, the exponent is beta. The tower
variant uses theta = 3 and a_k = k^k, giving an infinite exponent.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import mpmath

from ..angles import PrecisionError, RealSubspace, principal_angles
from ..bounds import spectrum_threshold
from ..exact_core import PreconditionError, content, maximal_minors
from ..grassmann import RationalSubspace, from_basis
from ..serialization import mpf_to_hex


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24; trial division below 1000."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def spectrum_theta(ell: int) -> int:
    """Smallest prime strictly above l! (2l+1)^l."""
    if ell < 1:
        raise PreconditionError("need l >= 1")
    candidate = math.factorial(ell) * (2 * ell + 1) ** ell + 1
    while not is_prime(candidate):
        candidate += 1
    return candidate


def floor_power(alpha: Fraction, k: int) -> int:
    return math.floor(Fraction(alpha) ** k)


@dataclass(frozen=True)
class SpectrumConfig:
    ell: int
    beta: Fraction | None = None  # None selects the tower variant
    seed: int = 0
    prec: int = 4096

    def __post_init__(self):
        if self.ell < 1:
            raise PreconditionError("need l >= 1")
        if self.beta is not None:
            beta = Fraction(self.beta)
            object.__setattr__(self, "beta", beta)
            if not spectrum_threshold(self.ell).is_at_most(beta):
                raise PreconditionError(
                    f"beta = {beta} is below the threshold 1 + 1/(2l) + sqrt(1 + 1/(4l^2)) for l = {self.ell}"
                )

    @property
    def tower(self) -> bool:
        return self.beta is None

    @property
    def alpha(self) -> Fraction | None:
        return None if self.tower else self.ell * self.beta

    @cached_property
    def theta(self) -> int:
        return 3 if self.tower else spectrum_theta(self.ell)

    def exponent(self, k: int) -> int:
        """a_k: floor(alpha^k), or k^k (with 0^0 = 1) for the tower variant."""
        if self.tower:
            return 1 if k == 0 else k**k
        return floor_power(self.alpha, k)

    def digits(self, count: int):
        """e_k^{(i,j)} for k < count as a list of l x l integer matrices."""
        rng = random.Random(self.seed)
        ell = self.ell
        out = []
        for _ in range(count):
            if self.tower:
                block = [[rng.choice((1, 2)) for _ in range(ell)] for _ in range(ell)]
            else:
                block = [
                    [rng.choice((2 * ell, 2 * ell + 1)) if i == j else rng.choice((1, 2)) for j in range(ell)]
                    for i in range(ell)
                ]
            out.append(block)
        return out

    def required_precision(self, truncation: int) -> int:
        """64 + ceil(alpha^(K+1) log2 theta) bits (with k^k in place of alpha^k for the tower)."""
        growth = Fraction(self.exponent(truncation + 1)) if self.tower else self.alpha ** (truncation + 1)
        with mpmath.workprec(64):
            bits = mpmath.mpf(growth.numerator) / growth.denominator * mpmath.log(self.theta, 2)
        return 64 + int(mpmath.ceil(bits))

    def descriptor(self) -> dict:
        return {
            "kind": "spectrum",
            "ell": self.ell,
            "beta": None if self.tower else str(self.beta),
            "seed": self.seed,
            "prec": self.prec,
        }


@dataclass(frozen=True)
class SpectrumRecord:
    N: int
    subspace: RationalSubspace = field(repr=False)
    minors_gcd: int
    log_height: object
    height_ratio: object  # H(B_N) / theta^(l a_N)
    psi: object  # psi_l(A, B_N)
    exponent: object  # -log psi / log H
    scaled_psi: object  # psi * H^(alpha / l)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "minors_gcd": self.minors_gcd,
            "height_squared": str(self.subspace.height_squared),
            "height_ratio": mpf_to_hex(self.height_ratio),
            "psi": mpf_to_hex(self.psi),
            "exponent": mpf_to_hex(self.exponent),
            "scaled_psi": None if self.scaled_psi is None else mpf_to_hex(self.scaled_psi),
        }


@dataclass(frozen=True)
class SpectrumState:
    config: SpectrumConfig
    truncation: int
    digits: tuple = field(repr=False)
    xi_exact: tuple = field(repr=False)  # l x l Fractions, the truncated series
    subspace: RealSubspace = field(repr=False)

    @property
    def prec(self) -> int:
        return self.config.prec

    def numerators(self, N: int):
        """F_N with entries theta^{a_N} sum_{k<=N} e_k / theta^{a_k} (integers)."""
        cfg = self.config
        top = cfg.exponent(N)
        ell = cfg.ell
        return [
            [sum(self.digits[k][i][j] * cfg.theta ** (top - cfg.exponent(k)) for k in range(N + 1)) for j in range(ell)]
            for i in range(ell)
        ]

    def tail_bounds_hold(self, N: int) -> bool:
        """0 < xi - f_N / theta^{a_N} < (4l+2) theta^{-a_{N+1}} for every entry (exact)."""
        cfg = self.config
        scale = Fraction(cfg.theta) ** cfg.exponent(N)
        limit = Fraction(4 * cfg.ell + 2, cfg.theta ** cfg.exponent(N + 1))
        f = self.numerators(N)
        return all(
            0 < self.xi_exact[i][j] - f[i][j] / scale < limit for i in range(cfg.ell) for j in range(cfg.ell)
        )

    def basis_matrix(self, N: int):
        cfg = self.config
        ell = cfg.ell
        top = cfg.theta ** cfg.exponent(N)
        f = self.numerators(N)
        upper = [[top if i == j else 0 for j in range(ell)] for i in range(ell)]
        return upper + f

    def b_n(self, N: int) -> RationalSubspace:
        if N > self.truncation - 1:
            raise PreconditionError(f"N = {N} needs truncation at least {N + 1}, have {self.truncation}")
        return from_basis(self.basis_matrix(N))

    def record(self, N: int) -> SpectrumRecord:
        cfg = self.config
        matrix = self.basis_matrix(N)
        gcd = content(maximal_minors(matrix))
        space = self.b_n(N)
        with mpmath.workprec(self.prec):
            profile = principal_angles(self.subspace, space, self.prec)
            psi = profile.psis[cfg.ell - 1]
            log_h = mpmath.log(mpmath.mpf(space.height_squared)) / 2
            ratio = mpmath.exp(log_h - cfg.ell * cfg.exponent(N) * mpmath.log(cfg.theta))
            exponent = -mpmath.log(psi) / log_h if psi > 0 and log_h > 0 else mpmath.inf
            scaled = None
            if not cfg.tower:
                a = cfg.alpha
                scaled = psi * mpmath.exp(log_h * mpmath.mpf(a.numerator) / (a.denominator * cfg.ell))
        return SpectrumRecord(N, space, gcd, log_h, ratio, psi, exponent, scaled)


def spectrum_build(config: SpectrumConfig, truncation: int) -> SpectrumState:
    """Truncate each series after the term k = truncation and build A at config.prec."""
    if truncation < 1:
        raise PreconditionError("truncation must be at least 1")
    needed = config.required_precision(truncation)
    if config.prec < needed:
        raise PrecisionError(f"truncation {truncation} is not resolved at {config.prec} bits", needed)
    digits = config.digits(truncation + 1)
    ell = config.ell
    xi = tuple(
        tuple(
            sum(Fraction(digits[k][i][j], config.theta ** config.exponent(k)) for k in range(truncation + 1))
            for j in range(ell)
        )
        for i in range(ell)
    )
    with mpmath.workprec(config.prec):
        columns = []
        for j in range(ell):
            col = [mpmath.mpf(int(i == j)) for i in range(ell)]
            col += [mpmath.mpf(xi[i][j].numerator) / xi[i][j].denominator for i in range(ell)]
            columns.append(col)
        subspace = RealSubspace.from_columns(columns, config.prec, provenance="spectrum")
    return SpectrumState(config, truncation, tuple(tuple(map(tuple, d)) for d in digits), xi, subspace)


def spectrum_infinite_variant(ell: int, truncation: int, seed: int = 0, prec: int | None = None) -> SpectrumState:
    config = SpectrumConfig(ell, None, seed, 64)
    config = SpectrumConfig(ell, None, seed, prec or config.required_precision(truncation))
    return spectrum_build(config, truncation)


def height_upper_constant(ell: int):
    """(2(2l+1) sqrt(2l))^l."""
    return (2 * (2 * ell + 1) * mpmath.sqrt(2 * ell)) ** ell
