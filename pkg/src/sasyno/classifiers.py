"""Base-learner interface and the built-in k-nearest-neighbour classifier.

Any estimator with ``fit(X, y)`` and ``predict(X)`` plugs into the
harness; :class:`KNNClassifier` is the only one shipped.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .neighbors import kneighbors
from .validation import check_features, check_labelled, minority_majority, ordered_labels


class KNNClassifier(ClassifierMixin, BaseEstimator):
    """Brute-force Euclidean k-NN with deterministic tie handling.

    Distance ties go to the lower training index. Vote ties go to
    ``minority_label``; when it is None the minority of the training
    labels is used (first-seen label on an exact count tie).

    Parameters
    ----------
    n_neighbors : int, default=1
    minority_label : label, optional
    """

    def __init__(self, n_neighbors=1, minority_label=None):
        self.n_neighbors = n_neighbors
        self.minority_label = minority_label

    def fit(self, X, y):
        X, y = check_labelled(X, y)
        if not 1 <= self.n_neighbors <= X.shape[0]:
            raise ValueError(
                f"n_neighbors must be in [1, {X.shape[0]}], got {self.n_neighbors}"
            )
        self.X_ = X
        self.y_ = y
        self.classes_ = np.array(ordered_labels(y))
        self.n_features_in_ = X.shape[1]
        if self.minority_label is not None:
            self.tie_label_ = self.minority_label
        elif len(self.classes_) == 2:
            self.tie_label_ = minority_majority(y)[0]
        else:
            counts = [np.sum(y == c) for c in self.classes_]
            self.tie_label_ = self.classes_[int(np.argmin(counts))]
        return self

    def predict(self, X):
        check_is_fitted(self, "X_")
        X = check_features(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, the model was fitted with {self.n_features_in_}"
            )
        nn = kneighbors(self.X_, X, self.n_neighbors)
        if self.n_neighbors == 1:
            return self.y_[nn[:, 0]]
        votes = np.stack([(self.y_[nn] == c).sum(axis=1) for c in self.classes_], axis=1)
        best = votes.max(axis=1)
        winner = self.classes_[np.argmax(votes, axis=1)]
        tie_col = np.flatnonzero(self.classes_ == self.tie_label_)
        if tie_col.size:
            tied = votes[:, tie_col[0]] == best
            winner = np.where(tied, self.tie_label_, winner)
        return winner


def knn_fit(train, k=1, minority_label=None):
    """Fit a :class:`KNNClassifier` on a :class:`~sasyno.dataset.Dataset`."""
    return KNNClassifier(n_neighbors=k, minority_label=minority_label).fit(train.X, train.y)


def knn_predict(model, queries):
    X = queries.X if hasattr(queries, "X") else queries
    return model.predict(X)
