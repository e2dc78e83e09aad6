"""scikit-learn style wrapper around the frontier search."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .angles import RealSubspace
from .enumeration import DEFAULT_WORK_LIMIT, EnumerationPlan, fit_exponent, frontier


class FrontierEstimator(BaseEstimator):
    """Fit the best-approximation frontier of a real subspace and its exponent.

    fit(A) accepts a RealSubspace or an n x d array whose columns span A.
    After fitting, frontier_ holds the records and exponent_ the ExponentFit
    (None when fewer than three records have psi > 0).
    """

    def __init__(self, e=1, j=1, height_max=10, strategy="exhaustive", effort=8,
                 work_limit=DEFAULT_WORK_LIMIT, workers=1, prec=128):
        self.e = e
        self.j = j
        self.height_max = height_max
        self.strategy = strategy
        self.effort = effort
        self.work_limit = work_limit
        self.workers = workers
        self.prec = prec

    def fit(self, A, y=None, structure=None):
        if not isinstance(A, RealSubspace):
            columns = np.asarray(A, dtype=float).T.tolist()
            A = RealSubspace.from_columns(columns, self.prec, provenance="array")
        plan = EnumerationPlan(A.n, self.e, self.height_max, self.strategy, self.work_limit, self.workers, self.effort)
        self.frontier_ = frontier(A, self.e, self.j, plan, structure=structure, prec=self.prec)
        usable = [r for r in self.frontier_.records if r.psi > 0]
        self.exponent_ = fit_exponent(usable) if len(usable) >= 3 else None
        return self
