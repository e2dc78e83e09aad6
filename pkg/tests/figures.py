"""Exponent bounds as printed in the R^2..R^6 figures, keyed by (n, d, e, j).

Values are (lower, upper); upper None means no finite bound. Where a figure
prints both a classical interval and a sharper result, the sharper one is kept.
"""

from fractions import Fraction as F

FIGURES = {
    (2, 1, 1, 1): (F(2), F(2)),
    (3, 1, 1, 1): (F(3, 2), F(3, 2)),
    (3, 2, 1, 1): (F(3), F(3)),
    (3, 1, 2, 1): (F(3), F(3)),
    (4, 1, 1, 1): (F(4, 3), F(4, 3)),
    (4, 2, 1, 1): (F(2), F(2)),
    (4, 3, 1, 1): (F(4), F(4)),
    (4, 1, 2, 1): (F(2), F(2)),
    (4, 2, 2, 1): (F(3), F(3)),
    (4, 2, 2, 2): (F(1), F(1)),
    (4, 1, 3, 1): (F(4), F(4)),
    (5, 1, 1, 1): (F(5, 4), F(5, 4)),
    (5, 2, 1, 1): (F(5, 3), F(5, 3)),
    (5, 3, 1, 1): (F(5, 2), F(5, 2)),
    (5, 4, 1, 1): (F(5), F(5)),
    (5, 1, 2, 1): (F(5, 3), F(5, 3)),
    (5, 2, 2, 1): (F(20, 9), F(3)),
    (5, 2, 2, 2): (F(5, 9), F(5, 6)),
    (5, 3, 2, 1): (F(4), F(6)),
    (5, 3, 2, 2): (F(5, 4), F(5, 4)),
    (5, 1, 3, 1): (F(5, 2), F(5, 2)),
    (5, 2, 3, 1): (F(4), F(7)),
    (5, 2, 3, 2): (F(5, 4), F(5, 4)),
    (5, 1, 4, 1): (F(5), F(5)),
    (6, 1, 1, 1): (F(6, 5), F(6, 5)),
    (6, 2, 1, 1): (F(3, 2), F(3, 2)),
    (6, 3, 1, 1): (F(2), F(2)),
    (6, 4, 1, 1): (F(3), F(3)),
    (6, 5, 1, 1): (F(6), F(6)),
    (6, 1, 2, 1): (F(3, 2), F(3, 2)),
    (6, 2, 2, 1): (F(15, 8), F(3)),
    (6, 2, 2, 2): (F(6, 11), F(3, 4)),
    (6, 3, 2, 1): (F(5, 2), F(9, 2)),
    (6, 3, 2, 2): (F(1), F(1)),
    (6, 4, 2, 1): (F(5), F(9)),
    (6, 4, 2, 2): (F(3, 2), F(3, 2)),
    (6, 1, 3, 1): (F(2), F(2)),
    (6, 2, 3, 1): (F(5, 2), F(5)),
    (6, 2, 3, 2): (F(1), F(1)),
    (6, 3, 3, 1): (F(4), F(6)),
    (6, 3, 3, 2): (F(5, 4), F(5)),
    (6, 3, 3, 3): (F(16, 45), F(2, 3)),
    (6, 1, 4, 1): (F(3), F(3)),
    (6, 2, 4, 1): (F(5), F(9)),
    (6, 2, 4, 2): (F(3, 2), F(3, 2)),
    (6, 1, 5, 1): (F(6), F(6)),
}
