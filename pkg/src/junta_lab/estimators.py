"""scikit-learn wrapper around exact optimal junta search."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .boolfn import Distribution, ProbFunction
from .config import MAX_JUNTA_ARITY
from .exceptions import CapacityError
from .junta import optimal_junta


def _to_indices(X):
    X = np.asarray(X)
    if not np.all(np.isin(X, (-1, 0, 1))):
        raise ValueError("features must be +-1 or 0/1")
    bits = (X == 1).astype(np.int64)
    return bits @ (1 << np.arange(X.shape[1], dtype=np.int64))


class OptimalJuntaClassifier(ClassifierMixin, BaseEstimator):
    """Best classifier depending on at most ``r`` features.

    Rows are points of the hypercube (+-1 or 0/1 entries). Fitting builds
    the empirical distribution and the empirical label probability at each
    point, then runs the exhaustive junta search.
    """

    def __init__(self, r=1):
        self.r = r

    def fit(self, X, y, sample_weight=None):
        X, y = check_X_y(X, y)
        n = X.shape[1]
        if n > MAX_JUNTA_ARITY:
            raise CapacityError(f"{n} features exceed the exhaustive-search limit {MAX_JUNTA_ARITY}")
        self.classes_ = np.unique(y)
        if self.classes_.size > 2:
            raise ValueError("only binary labels are supported")
        pos = self.classes_[-1]
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        idx = _to_indices(X)
        mass = np.bincount(idx, weights=w, minlength=1 << n)
        plus = np.bincount(idx, weights=w * (y == pos), minlength=1 << n)
        # unseen points carry no mass, so their label probability is irrelevant
        p = np.divide(plus, mass, out=np.full(1 << n, 0.5), where=mass > 0)
        D = Distribution.from_unnormalized(mass, n)
        self.junta_ = optimal_junta(ProbFunction(p, n), D, self.r)
        self.coords_ = np.array(self.junta_.coord_list)
        self.table_ = self.junta_.table
        self.advantage_ = self.junta_.advantage
        self.n_features_in_ = n
        return self

    def predict(self, X):
        check_is_fitted(self, "junta_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        out = self.junta_.predict_index(_to_indices(X))
        if self.classes_.size == 1:
            return np.full(len(X), self.classes_[0])
        return np.where(out == 1, self.classes_[-1], self.classes_[0])
