"""Input validation helpers shared by the samplers, classifier and harness."""

import numpy as np
from sklearn.utils.validation import check_array, check_X_y


class DataFormatError(ValueError):
    """Raised when a data file cannot be parsed into a dataset."""


class UndefinedMetricError(ValueError):
    """Raised when a metric needs a class that is absent from the truth labels."""


def check_features(X, min_samples=1, name="X"):
    """Return ``X`` as a finite 2-D float array with at least ``min_samples`` rows."""
    X = check_array(X, dtype=np.float64, ensure_min_samples=1,
                    ensure_all_finite=True, input_name=name)
    if X.shape[0] < min_samples:
        raise ValueError(
            f"{name} needs at least {min_samples} samples, got {X.shape[0]}"
        )
    return X


def check_labelled(X, y):
    """Validate a feature matrix and its label vector; labels are kept as-is."""
    X, y = check_X_y(X, y, dtype=np.float64, ensure_all_finite=True,
                     y_numeric=False)
    return X, np.asarray(y)


def ordered_labels(y):
    """Distinct labels of ``y`` in order of first appearance."""
    _, first = np.unique(y, return_index=True)
    return [y[i] for i in np.sort(first)]


def minority_majority(y):
    """Return ``(minority_label, majority_label)`` for a binary label vector.

    The less frequent label is the minority. On an exact tie, the label
    observed first in ``y`` is the minority.
    """
    labels = ordered_labels(np.asarray(y))
    if len(labels) != 2:
        shown = ", ".join(str(lab) for lab in labels)
        raise ValueError(
            f"expected exactly 2 distinct labels, observed {len(labels)}: {{{shown}}}"
        )
    a, b = labels
    count_a = int(np.sum(y == a))
    count_b = int(np.sum(y == b))
    if count_b < count_a:
        return b, a
    return a, b


def check_same_dim(*vectors):
    """Return the inputs as float arrays, insisting on a common last dimension."""
    arrays = [np.asarray(v, dtype=np.float64) for v in vectors]
    dims = {a.shape[-1] if a.ndim else 1 for a in arrays}
    if len(dims) != 1:
        raise ValueError(f"dimensionality mismatch: {sorted(dims)}")
    return arrays


def cap_neighbors(k, n_candidates):
    """Cap ``k`` to the number of available neighbours, never below 1."""
    if k < 1:
        raise ValueError(f"k_neighbors must be >= 1, got {k}")
    return min(int(k), n_candidates)
