import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from plurank.estimators import PluralityMatrixEstimator


def test_fit_and_scores():
    X = np.array([[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0]])
    est = PluralityMatrixEstimator().fit(X)
    assert est.n_alternatives_ == 3
    assert est.matrix_.p((0, 1), 0) == pytest.approx(0.5)
    assert est.borda_scores().sum() == pytest.approx(3)
    assert est.rank_variances().shape == (3,)


def test_weights_and_clone():
    X = np.array([[0, 1], [1, 0]])
    est = PluralityMatrixEstimator(degrees=(2,)).fit(X, sample_weight=[3.0, 1.0])
    assert est.matrix_.p((0, 1), 0) == pytest.approx(0.75)
    assert clone(est).get_params() == {"degrees": (2,)}


def test_unfitted():
    with pytest.raises(NotFittedError):
        PluralityMatrixEstimator().borda_scores()
