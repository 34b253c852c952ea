"""Baseline resamplers (SMOTE, ADASYN, Borderline-SMOTE, Safe-Level-SMOTE,
random down-sampling) and the common sampler configuration used by the harness.

Every neighbour search excludes the query sample itself and breaks
distance ties by the lower index.
"""

import logging
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .core import SASYNO, SyntheticBatch
from .dataset import Dataset, partition_by_class
from .neighbors import kneighbors
from .validation import cap_neighbors, check_features, check_labelled, minority_majority

logger = logging.getLogger(__name__)

SAMPLER_KINDS = ("SASYNO", "SMOTE", "ADASYN", "BLSMOTE", "SLSMOTE", "RDS", "ORIG")


def _capped_k(k, n_minority, caller):
    capped = cap_neighbors(k, n_minority - 1)
    if capped != k:
        logger.warning("%s: k_neighbors capped from %d to %d (minority size %d)",
                       caller, k, capped, n_minority)
    return capped


def _interpolate_towards(X0, base, neighbor, gap, label):
    """``x_base + gap * (x_neighbor - x_base)`` with provenance."""
    start = X0[base]
    end = X0[neighbor]
    samples = start + gap[:, None] * (end - start)
    return SyntheticBatch(samples, label, np.column_stack([base, neighbor]),
                          start, end, gap)


def _smote_from(X0, bases, nn, rng, label):
    """One synthetic per entry of ``bases``, toward a uniform pick of its neighbours."""
    pick = rng.integers(nn.shape[1], size=bases.size)
    neighbor = nn[bases, pick]
    gap = rng.random(bases.size)
    return _interpolate_towards(X0, bases, neighbor, gap, label)


def _merge(X0_dim, label, batches):
    batches = [b for b in batches if len(b)]
    if not batches:
        return SyntheticBatch.empty(X0_dim, label)
    return SyntheticBatch(
        np.vstack([b.samples for b in batches]), label,
        np.vstack([b.sources for b in batches]),
        np.vstack([b.p_hat for b in batches]),
        np.vstack([b.q_hat for b in batches]),
        np.concatenate([b.mix for b in batches]),
    )


def smote(minority, n_syn, k=5, rng=None, label=0):
    """Classic SMOTE: interpolate random minority samples toward one of their
    ``k`` nearest minority neighbours with a single U[0, 1] gap."""
    X0 = check_features(minority, min_samples=2, name="minority")
    if n_syn < 0:
        raise ValueError(f"n_syn must be >= 0, got {n_syn}")
    k = _capped_k(k, X0.shape[0], "SMOTE")
    rng = np.random.default_rng(rng)
    if n_syn == 0:
        return SyntheticBatch.empty(X0.shape[1], label)
    nn = kneighbors(X0, X0, k, exclude_self=True)
    bases = rng.integers(X0.shape[0], size=n_syn)
    return _smote_from(X0, bases, nn, rng, label)


def _full_set(part):
    X = np.vstack([part.minority.X, part.majority.X])
    is_majority = np.r_[np.zeros(part.n0, bool), np.ones(part.n1, bool)]
    return X, is_majority


def majority_neighbor_counts(part, k):
    """Majority count among each minority sample's ``k`` nearest neighbours
    in the full training set (minority rows first)."""
    X, is_majority = _full_set(part)
    nn = kneighbors(X, X[:part.n0], k, exclude_self=True)
    return is_majority[nn].sum(axis=1)


def adasyn_allocation(weights, total):
    """Integer synthetic counts per sample summing exactly to ``total``.

    Counts are ``round(w_i * total)`` and the rounding residue is applied
    one unit at a time to the highest-weight samples (lower index first
    on ties); a negative residue is only taken from samples holding at
    least one synthetic.
    """
    weights = np.asarray(weights, dtype=np.float64)
    g = np.floor(weights * total + 0.5).astype(np.int64)
    order = np.argsort(-weights, kind="stable")
    residue = total - int(g.sum())
    step = 1 if residue > 0 else -1
    pos = 0
    while residue:
        i = order[pos % order.size]
        if step > 0 or g[i] > 0:
            g[i] += step
            residue -= step
        pos += 1
    return g


def adasyn(train, k=5, rng=None):
    """ADASYN on a :class:`ClassPartition`; returns ``n1 - n0`` synthetics.

    Samples with more majority neighbours receive proportionally more
    synthetics. If no minority sample has a majority neighbour the
    allocation is uniform.
    """
    if train.n0 < 2:
        raise ValueError(f"minority needs at least 2 samples, got {train.n0}")
    rng = np.random.default_rng(rng)
    label = train.minority_label
    X0 = train.minority.X
    total = train.n1 - train.n0
    k_full = cap_neighbors(k, train.n0 + train.n1 - 1)
    k_min = _capped_k(k, train.n0, "ADASYN")
    if total == 0:
        return SyntheticBatch.empty(X0.shape[1], label), np.zeros(train.n0, np.int64)

    ratio = majority_neighbor_counts(train, k_full) / k_full
    if ratio.sum() > 0:
        weights = ratio / ratio.sum()
    else:
        weights = np.full(train.n0, 1.0 / train.n0)
    g = adasyn_allocation(weights, total)
    nn = kneighbors(X0, X0, k_min, exclude_self=True)
    bases = np.repeat(np.arange(train.n0), g)
    return _smote_from(X0, bases, nn, rng, label), g


def borderline_categories(part, k):
    """Label each minority sample ``"noise"``, ``"danger"`` or ``"safe"``."""
    k = cap_neighbors(k, part.n0 + part.n1 - 1)
    m = majority_neighbor_counts(part, k)
    cat = np.full(part.n0, "safe", dtype=object)
    cat[(m >= k / 2) & (m < k)] = "danger"
    cat[m == k] = "noise"
    return cat


def blsmote(train, k=5, rng=None):
    """Borderline-SMOTE: SMOTE seeded only from minority samples in danger.

    Falls back to plain SMOTE over the whole minority when nothing is in
    danger. Returns ``(batch, danger_indices)``.
    """
    if train.n0 < 2:
        raise ValueError(f"minority needs at least 2 samples, got {train.n0}")
    rng = np.random.default_rng(rng)
    X0 = train.minority.X
    total = train.n1 - train.n0
    danger = np.flatnonzero(borderline_categories(train, k) == "danger")
    if danger.size == 0:
        logger.info("BLSMOTE: no minority sample in danger; falling back to SMOTE")
        return smote(X0, total, k, rng, label=train.minority_label), danger
    k_min = _capped_k(k, train.n0, "BLSMOTE")
    if total == 0:
        return SyntheticBatch.empty(X0.shape[1], train.minority_label), danger
    nn = kneighbors(X0, X0, k_min, exclude_self=True)
    bases = danger[rng.integers(danger.size, size=total)]
    return _smote_from(X0, bases, nn, rng, train.minority_label), danger


def minority_neighbor_counts(part, k):
    """Safe level: minority count among each minority sample's ``k``
    nearest neighbours in the full training set."""
    k = cap_neighbors(k, part.n0 + part.n1 - 1)
    return k - majority_neighbor_counts(part, k)


def safe_level_gap(sl_p, sl_n, rng):
    """Interpolation gap for one (base, neighbour) pair, or None to skip it."""
    if sl_n == 0:
        return None if sl_p == 0 else 0.0
    ratio = sl_p / sl_n
    if ratio == 1:
        return rng.random()
    if ratio > 1:
        return rng.uniform(0.0, 1.0 / ratio)
    return rng.uniform(1.0 - ratio, 1.0)


def slsmote(train, k=5, rng=None):
    """Safe-Level-SMOTE on a :class:`ClassPartition`.

    Draws (base, neighbour) pairs at random and places the synthetic
    according to the two safe levels. After ``100 * (n1 - n0)`` attempts
    any shortfall is padded with plain SMOTE.
    """
    if train.n0 < 2:
        raise ValueError(f"minority needs at least 2 samples, got {train.n0}")
    rng = np.random.default_rng(rng)
    X0 = train.minority.X
    label = train.minority_label
    total = train.n1 - train.n0
    k_min = _capped_k(k, train.n0, "SLSMOTE")
    if total == 0:
        return SyntheticBatch.empty(X0.shape[1], label)
    safe = minority_neighbor_counts(train, k)
    nn = kneighbors(X0, X0, k_min, exclude_self=True)

    base, neighbor, gap = [], [], []
    attempts = 0
    while len(base) < total and attempts < 100 * total:
        attempts += 1
        p = int(rng.integers(train.n0))
        n = int(nn[p, rng.integers(k_min)])
        lam = safe_level_gap(safe[p], safe[n], rng)
        if lam is None:
            continue
        base.append(p)
        neighbor.append(n)
        gap.append(lam)
    batch = _interpolate_towards(X0, np.array(base, dtype=np.intp),
                                 np.array(neighbor, dtype=np.intp),
                                 np.array(gap, dtype=np.float64), label)
    short = total - len(base)
    if short:
        logger.warning("SLSMOTE: retry cap reached; padding %d synthetics with SMOTE", short)
        batch = _merge(X0.shape[1], label, [batch, smote(X0, short, k, rng, label)])
    return batch


def random_downsample(majority, target, rng=None):
    """Keep ``target`` majority rows chosen uniformly without replacement.

    Works on a :class:`Dataset` or an array; the kept rows stay in their
    original order.
    """
    n = majority.n_samples if isinstance(majority, Dataset) else len(majority)
    if not 0 <= target <= n:
        raise ValueError(f"target must be in [0, {n}], got {target}")
    rng = np.random.default_rng(rng)
    keep = np.sort(rng.choice(n, size=target, replace=False))
    if isinstance(majority, Dataset):
        return majority.subset(keep)
    return np.asarray(majority)[keep]


# -- estimator wrappers -------------------------------------------------------

def _partition_arrays(X, y):
    X, y = check_labelled(X, y)
    return X, y, partition_by_class(Dataset(X, y))


def _append(X, y, batch, label):
    y_new = np.full(len(batch), label, dtype=y.dtype)
    return np.vstack([X, batch.samples]), np.concatenate([y, y_new])


class _OverSampler(BaseEstimator):
    def __init__(self, k_neighbors=5, random_state=None):
        self.k_neighbors = k_neighbors
        self.random_state = random_state

    def fit_resample(self, X, y):
        X, y, part = _partition_arrays(X, y)
        self.minority_label_ = part.minority_label
        self.majority_label_ = part.majority_label
        self.k_neighbors_ = cap_neighbors(self.k_neighbors, part.n0 - 1)
        self.batch_ = self._generate(part, np.random.default_rng(self.random_state))
        return _append(X, y, self.batch_, part.minority_label)


class SMOTE(_OverSampler):
    """SMOTE over-sampler balancing both classes."""

    def _generate(self, part, rng):
        return smote(part.minority.X, part.n1 - part.n0, self.k_neighbors, rng,
                     label=part.minority_label)


class ADASYN(_OverSampler):
    """ADASYN over-sampler; ``allocation_`` holds the per-sample counts."""

    def _generate(self, part, rng):
        batch, self.allocation_ = adasyn(part, self.k_neighbors, rng)
        return batch


class BorderlineSMOTE(_OverSampler):
    """Borderline-SMOTE over-sampler; ``danger_indices_`` index the minority rows."""

    def _generate(self, part, rng):
        batch, self.danger_indices_ = blsmote(part, self.k_neighbors, rng)
        return batch


class SafeLevelSMOTE(_OverSampler):
    """Safe-Level-SMOTE over-sampler."""

    def _generate(self, part, rng):
        return slsmote(part, self.k_neighbors, rng)


class RandomDownSampler(BaseEstimator):
    """Drop majority rows at random until both classes have ``n0`` rows."""

    def __init__(self, random_state=None):
        self.random_state = random_state

    def fit_resample(self, X, y):
        X, y, part = _partition_arrays(X, y)
        keep = random_downsample(part.majority_index, part.n0, self.random_state)
        idx = np.sort(np.concatenate([part.minority_index, keep]))
        self.sample_indices_ = idx
        return X[idx], y[idx]


class NoResampling(BaseEstimator):
    """Identity resampler for the untouched-data baseline."""

    def fit_resample(self, X, y):
        X, y = check_labelled(X, y)
        self.sample_indices_ = np.arange(X.shape[0])
        return X, y


@dataclass(frozen=True)
class SamplerConfig:
    """Which resampler to run, its neighbour count and seed."""

    kind: str
    k_neighbors: int = 5
    seed: object = None
    name: str = None

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in SAMPLER_KINDS:
            raise ValueError(f"unknown sampler {self.kind!r}; choose from {SAMPLER_KINDS}")
        if self.k_neighbors < 1:
            raise ValueError(f"k_neighbors must be >= 1, got {self.k_neighbors}")
        object.__setattr__(self, "kind", kind)

    @property
    def label(self):
        return self.name or self.kind

    def build(self, random_state=None):
        """Fresh estimator for this configuration."""
        rs = self.seed if random_state is None else random_state
        if self.kind == "SASYNO":
            return SASYNO(random_state=rs)
        if self.kind == "RDS":
            return RandomDownSampler(random_state=rs)
        if self.kind == "ORIG":
            return NoResampling()
        cls = {"SMOTE": SMOTE, "ADASYN": ADASYN,
               "BLSMOTE": BorderlineSMOTE, "SLSMOTE": SafeLevelSMOTE}[self.kind]
        return cls(k_neighbors=self.k_neighbors, random_state=rs)


def apply_sampler(config, train, rng=None):
    """Resample a binary training :class:`Dataset` according to ``config``."""
    minority_majority(train.y)  # binary check before dispatch
    if config.kind == "ORIG":
        return train
    if rng is not None:
        rng = np.random.default_rng(rng)
    X, y = config.build(rng).fit_resample(train.X, train.y)
    return train.with_data(X, y)
