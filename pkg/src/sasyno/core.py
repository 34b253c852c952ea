"""Self-adaptive synthetic over-sampling (SASYNO).

Synthetic minority samples are generated in three steps:

1. A closeness radius ``gamma`` is derived from the minority data alone:
   the mean of all pairwise distances that do not exceed the overall mean
   pairwise distance ``mu``. Every minority pair closer than ``gamma``
   becomes a seed pair.
2. Both endpoints of a randomly chosen seed pair are jittered with
   zero-mean Gaussian noise whose per-attribute standard deviation is
   computed the same way as ``gamma``, one attribute at a time.
3. The synthetic sample is a per-attribute uniform random mix of the two
   jittered endpoints.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist
from sklearn.base import BaseEstimator

from .dataset import concatenate, partition_by_class
from .neighbors import kneighbors
from .validation import check_features, check_labelled, check_same_dim, minority_majority

logger = logging.getLogger(__name__)


def _pair_distances(X):
    X = check_features(X, min_samples=2, name="samples")
    return X, pdist(X, "euclidean")


def _thresholded_mean(dist):
    """Mean of the distances, and mean of those not exceeding that mean."""
    mu = float(np.mean(dist))
    close = dist[dist <= mu]
    # close is never empty mathematically; guard against rounding anyway
    inner = float(np.mean(close)) if close.size else mu
    return mu, inner


def mean_pairwise_distance(samples):
    """Average Euclidean distance over all unordered pairs of ``samples``."""
    _, dist = _pair_distances(samples)
    return float(np.mean(dist))


def gamma_quantifier(samples, return_mu=False):
    """Data-driven closeness radius of a sample set.

    Returns the mean of the pairwise Euclidean distances that are no
    larger than the mean pairwise distance. With ``return_mu=True`` the
    pair ``(gamma, mu)`` is returned.
    """
    _, dist = _pair_distances(samples)
    mu, gamma = _thresholded_mean(dist)
    return (gamma, mu) if return_mu else gamma


@dataclass(frozen=True)
class PairSet:
    """Unordered index pairs ``(i, j)`` with ``i < j``, shape (n_pairs, 2)."""

    pairs: np.ndarray
    radius: float

    def __len__(self):
        return self.pairs.shape[0]

    def as_set(self):
        return {(int(i), int(j)) for i, j in self.pairs}


def _pairs_from_condensed(n, dist, radius):
    i, j = np.triu_indices(n, k=1)
    keep = dist <= radius
    return np.column_stack([i[keep], j[keep]]).astype(np.intp)


def neighbor_pairs(samples, gamma):
    """All unordered pairs of ``samples`` whose distance is at most ``gamma``."""
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    X, dist = _pair_distances(samples)
    return PairSet(_pairs_from_condensed(X.shape[0], dist, gamma), float(gamma))


def nearest_neighbor_pairs(samples):
    """Pair every sample with its nearest other sample, deduplicated."""
    X = check_features(samples, min_samples=2, name="samples")
    nn = kneighbors(X, X, 1, exclude_self=True)[:, 0]
    i = np.arange(X.shape[0])
    pairs = np.unique(np.sort(np.column_stack([i, nn]), axis=1), axis=0)
    return pairs.astype(np.intp)


def per_attribute_sigma(samples):
    """Per-attribute disturbance scales.

    Returns ``(sigma, mu_l)``: for each attribute, ``mu_l`` is the mean
    absolute difference over all pairs and ``sigma`` the mean of those
    differences not exceeding ``mu_l``. Constant attributes get 0.
    """
    X = check_features(samples, min_samples=2, name="samples")
    M = X.shape[1]
    sigma = np.zeros(M)
    mu_l = np.zeros(M)
    for l in range(M):
        diff = pdist(X[:, l:l + 1], "cityblock")
        mu_l[l], sigma[l] = _thresholded_mean(diff)
    return sigma, mu_l


@dataclass(frozen=True)
class DisturbanceProfile:
    gamma: float
    mu: float
    sigma: np.ndarray
    mu_l: np.ndarray


def disturbance_profile(samples):
    gamma, mu = gamma_quantifier(samples, return_mu=True)
    sigma, mu_l = per_attribute_sigma(samples)
    return DisturbanceProfile(gamma, mu, sigma, mu_l)


def gaussian_disturb(p, q, sigma, rng=None):
    """Jitter both endpoints with independent N(0, sigma_l^2) noise per attribute.

    ``p`` and ``q`` may be single vectors or (n, M) stacks; one fresh
    draw is made per element. Noise for ``p`` is drawn before noise for
    ``q``.
    """
    p, q, sigma = check_same_dim(p, q, sigma)
    if p.shape != q.shape:
        raise ValueError(f"p and q shapes differ: {p.shape} vs {q.shape}")
    if np.any(sigma < 0):
        raise ValueError("sigma must be nonnegative")
    rng = np.random.default_rng(rng)
    g_p = sigma * rng.standard_normal(p.shape)
    g_q = sigma * rng.standard_normal(q.shape)
    return p + g_p, q + g_q


def interpolate(p_hat, q_hat, rng=None, r=None):
    """Per-attribute random mix ``r * p_hat + (1 - r) * q_hat``.

    ``r`` holds one U[0, 1] weight per attribute (and per row for stacked
    input); it is drawn from ``rng`` unless given explicitly.
    """
    p_hat, q_hat = check_same_dim(p_hat, q_hat)
    if p_hat.shape != q_hat.shape:
        raise ValueError(f"p_hat and q_hat shapes differ: {p_hat.shape} vs {q_hat.shape}")
    if r is None:
        r = np.random.default_rng(rng).random(p_hat.shape)
    r = np.broadcast_to(np.asarray(r, dtype=np.float64), p_hat.shape)
    return r * p_hat + (1.0 - r) * q_hat


@dataclass(frozen=True)
class SyntheticBatch:
    """Synthetic minority samples with per-sample provenance.

    ``sources`` holds the two minority indices each synthetic was built
    from. ``p_hat`` and ``q_hat`` are the segment endpoints actually
    mixed (jittered pair ends for SASYNO, base sample and neighbour for
    the SMOTE family) and ``mix`` the mixing weights used.
    """

    samples: np.ndarray
    label: object
    sources: np.ndarray
    p_hat: np.ndarray
    q_hat: np.ndarray
    mix: np.ndarray

    def __len__(self):
        return self.samples.shape[0]

    @classmethod
    def empty(cls, n_features, label):
        z = np.empty((0, n_features))
        return cls(z, label, np.empty((0, 2), dtype=np.intp), z, z, z)


def _pairs_or_fallback(X, pairs):
    if len(pairs):
        return pairs
    logger.warning("no neighbouring pairs within gamma; using nearest-neighbour pairs")
    return nearest_neighbor_pairs(X)


def sasyno_oversample(minority, target_count, rng=None, label=0, profile=None):
    """Generate ``target_count`` synthetic samples from minority feature rows.

    Parameters
    ----------
    minority : array-like of shape (n0, M) or Dataset
        Minority samples; at least 2 are needed.
    target_count : int
        Number of synthetics to create (``n1 - n0`` to balance).
    rng : seed or numpy Generator
    label : object
        Label attached to the batch (ignored when ``minority`` is a Dataset
        with a single label, which is used instead).
    profile : DisturbanceProfile, optional
        Precomputed statistics of ``minority``.

    Returns
    -------
    SyntheticBatch
    """
    if hasattr(minority, "X"):
        if len(minority.labels) == 1:
            label = minority.labels[0]
        minority = minority.X
    X = check_features(minority, min_samples=2, name="minority")
    if target_count < 0:
        raise ValueError(f"target_count must be >= 0, got {target_count}")
    rng = np.random.default_rng(rng)

    if profile is None:
        profile = disturbance_profile(X)
    pairs = _pairs_or_fallback(X, neighbor_pairs(X, profile.gamma).pairs)

    if target_count == 0:
        return SyntheticBatch.empty(X.shape[1], label)

    chosen = pairs[rng.integers(pairs.shape[0], size=target_count)]
    p_hat, q_hat = gaussian_disturb(X[chosen[:, 0]], X[chosen[:, 1]], profile.sigma, rng)
    r = rng.random(p_hat.shape)
    s = interpolate(p_hat, q_hat, r=r)
    return SyntheticBatch(s, label, chosen, p_hat, q_hat, r)


def balance(d, rng=None):
    """Over-sample the minority class of ``d`` until both classes have ``n1`` rows.

    Original rows are kept unchanged and in order; synthetics are appended.
    """
    part = partition_by_class(d)
    batch = sasyno_oversample(part.minority.X, part.n1 - part.n0, rng,
                              label=part.minority_label)
    if not len(batch):
        return d
    labels = np.full(len(batch), part.minority_label, dtype=d.y.dtype)
    return concatenate(d, d.with_data(batch.samples, labels))


class SASYNO(BaseEstimator):
    """Self-adaptive synthetic over-sampler with a ``fit_resample`` interface.

    Parameters
    ----------
    random_state : int, numpy Generator or None
        Seed for pair selection, disturbance and interpolation.

    Attributes
    ----------
    profile_ : DisturbanceProfile
        ``gamma``, ``mu`` and per-attribute ``sigma`` of the minority class.
    pairs_ : PairSet
        Neighbouring minority pairs used as seeds.
    batch_ : SyntheticBatch
        Synthetics from the last call, with provenance.
    minority_label_, majority_label_ : labels
    """

    def __init__(self, random_state=None):
        self.random_state = random_state

    def fit_resample(self, X, y):
        X, y = check_labelled(X, y)
        self.minority_label_, self.majority_label_ = minority_majority(y)
        X0 = X[y == self.minority_label_]
        n_needed = int(np.sum(y == self.majority_label_)) - X0.shape[0]
        self.profile_ = disturbance_profile(X0)
        self.pairs_ = neighbor_pairs(X0, self.profile_.gamma)
        self.batch_ = sasyno_oversample(X0, n_needed, self.random_state,
                                        label=self.minority_label_,
                                        profile=self.profile_)
        y_new = np.full(n_needed, self.minority_label_, dtype=y.dtype)
        return np.vstack([X, self.batch_.samples]), np.concatenate([y, y_new])
