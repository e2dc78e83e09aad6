"""The planes A_xi of R^4 spanned by (0, 1, xi, s) and (1, 0, -s, xi), s = sqrt(7 - xi^2)."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import mpmath

from ..angles import RealSubspace
from ..exact_core import PreconditionError, pairing_determinant
from ..serialization import mpf_to_hex, to_mpf

# Plücker vector of the raw basis over the Q-basis (1, xi, s) of its coordinates
R4_PLUCKER_COEFFICIENTS = (
    (-1, 0, 0),
    (0, -1, 0),
    (0, 0, -1),
    (0, 0, -1),
    (0, 1, 0),
    (7, 0, 0),
)


@dataclass(frozen=True)
class PluckerStructure:
    """Plücker vector of a basis written as coefficients @ values (integer rows, real values)."""

    coefficients: tuple
    values: tuple = field(repr=False)

    def vector(self):
        return [mpmath.fsum(c * v for c, v in zip(row, self.values)) for row in self.coefficients]


@dataclass(frozen=True)
class R4Construction:
    xi: object
    root: object  # sqrt(7 - xi^2)
    prec: int
    basis: tuple = field(repr=False)
    subspace: RealSubspace = field(repr=False)
    structure: PluckerStructure = field(repr=False)

    def determinant_formula(self, eta):
        """det(X1, X2 | M_B) for a plane with Plücker vector eta."""
        with mpmath.workprec(self.prec):
            e1, e2, e3, e4, e5, e6 = eta
            return -e6 + 7 * e1 + (e5 - e2) * self.xi - (e3 + e4) * self.root

    def pairing(self, eta):
        with mpmath.workprec(self.prec):
            return pairing_determinant(self.structure.vector(), list(eta), 4, 2)

    def descriptor(self) -> dict:
        return {"kind": "r4", "xi": mpf_to_hex(self.xi), "prec": self.prec}


def construct_r4(xi, prec: int = 128) -> R4Construction:
    with mpmath.workprec(prec):
        xi = to_mpf(xi)
        if not 0 < xi or not xi * xi < 7:
            raise PreconditionError("xi must lie in (0, sqrt(7))")
        root = mpmath.sqrt(7 - xi * xi)
        x1 = (mpmath.mpf(0), mpmath.mpf(1), xi, root)
        x2 = (mpmath.mpf(1), mpmath.mpf(0), -root, xi)
        subspace = RealSubspace.from_columns([x1, x2], prec, provenance="r4")
        structure = PluckerStructure(R4_PLUCKER_COEFFICIENTS, (mpmath.mpf(1), xi, root))
    return R4Construction(xi, root, prec, (x1, x2), subspace, structure)


def r4_mod4_residues():
    """Residue triples (eta1, eta2, eta3) mod 4 with eta2^2 + eta3^2 = 3 eta1^2 (mod 4)."""
    return [t for t in product(range(4), repeat=3) if (t[1] ** 2 + t[2] ** 2 - 3 * t[0] ** 2) % 4 == 0]


def r4_obstruction_holds() -> bool:
    """Every admissible residue triple is even, so no primitive solution exists."""
    return all(all(x % 2 == 0 for x in t) for t in r4_mod4_residues())
