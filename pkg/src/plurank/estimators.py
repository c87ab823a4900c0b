"""Scikit-learn style wrapper around empirical plurality matrices."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import measures
from .plurality import plurality_matrix
from .prefcore import SampledProfile


class PluralityMatrixEstimator(BaseEstimator):
    """Estimate plurality slices from observed complete rankings.

    Parameters
    ----------
    degrees : tuple of int, default=(2, 3)
        Subset sizes to estimate.

    Attributes
    ----------
    matrix_ : PluralityMatrix
        Empirical matrix with per-entry counts.
    n_alternatives_ : int
    """

    def __init__(self, degrees=(2, 3)):
        self.degrees = degrees

    def fit(self, X, y=None, sample_weight=None):
        """Fit on an ``(n_voters, m)`` array of rankings (best first)."""
        X = np.asarray(X, dtype=np.int64)
        profile = SampledProfile(X, sample_weight)
        m = profile.m
        self.matrix_ = plurality_matrix(profile, [k for k in self.degrees if k <= m])
        self.n_alternatives_ = m
        return self

    def borda_scores(self) -> np.ndarray:
        check_is_fitted(self, "matrix_")
        return measures.borda_vector(self.matrix_)

    def rank_variances(self) -> np.ndarray:
        check_is_fitted(self, "matrix_")
        return np.array([measures.rank_variance(self.matrix_, a) for a in range(self.n_alternatives_)])
