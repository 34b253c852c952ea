"""Confusion matrix, imbalanced-classification metrics and rank tables.

The minority class is the positive class throughout.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .validation import UndefinedMetricError

MEASURES = ("SN", "SP", "GM", "FM", "Acc")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fn: int
    fp: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fn, self.fp, self.tn) < 0:
            raise ValueError("confusion-matrix counts must be nonnegative")

    @property
    def n0(self):
        """Truly minority."""
        return self.tp + self.fn

    @property
    def n1(self):
        """Truly majority."""
        return self.fp + self.tn

    @property
    def k0(self):
        """Predicted minority."""
        return self.tp + self.fp

    @property
    def k1(self):
        """Predicted majority."""
        return self.fn + self.tn

    @property
    def total(self):
        return self.tp + self.fn + self.fp + self.tn


def confusion_matrix(truth, predicted, minority_label, majority_label=None):
    """Count TP/FN/FP/TN with ``minority_label`` as the positive class.

    ``majority_label`` defaults to the single other label found in
    ``truth`` and ``predicted``; any third label is an error.
    """
    truth = np.asarray(truth)
    predicted = np.asarray(predicted)
    if truth.shape != predicted.shape or truth.ndim != 1:
        raise ValueError(
            f"truth and predicted must be 1-D of equal length, got {truth.shape} and {predicted.shape}"
        )
    seen = set(np.unique(truth).tolist()) | set(np.unique(predicted).tolist())
    others = seen - {minority_label}
    if majority_label is None:
        if len(others) > 1:
            raise ValueError(f"labels outside the binary set: {sorted(map(str, others))}")
        majority_label = next(iter(others), None)
    else:
        extra = others - {majority_label}
        if extra:
            raise ValueError(f"labels outside the binary set: {sorted(map(str, extra))}")
    pos_truth = truth == minority_label
    pos_pred = predicted == minority_label
    return ConfusionMatrix(
        tp=int(np.sum(pos_truth & pos_pred)),
        fn=int(np.sum(pos_truth & ~pos_pred)),
        fp=int(np.sum(~pos_truth & pos_pred)),
        tn=int(np.sum(~pos_truth & ~pos_pred)),
    )


@dataclass(frozen=True)
class MetricSet:
    """SN, SP, GM, FM and Acc. ``flags`` names metrics set to 0 because
    their denominator vanished."""

    sn: float
    sp: float
    gm: float
    fm: float
    acc: float
    flags: tuple = field(default=(), compare=False)

    def as_dict(self):
        return {"SN": self.sn, "SP": self.sp, "GM": self.gm, "FM": self.fm, "Acc": self.acc}

    @classmethod
    def mean(cls, sets):
        sets = list(sets)
        if not sets:
            raise ValueError("cannot average an empty list of metric sets")
        cols = np.array([[s.sn, s.sp, s.gm, s.fm, s.acc] for s in sets])
        return cls(*(float(v) for v in cols.mean(axis=0)))


def metrics(cm):
    """All five measures from a confusion matrix.

    Both truth classes must be present; otherwise
    :class:`~sasyno.validation.UndefinedMetricError` names the missing one.
    """
    if cm.n0 == 0:
        raise UndefinedMetricError("minority class absent from truth labels: SN undefined")
    if cm.n1 == 0:
        raise UndefinedMetricError("majority class absent from truth labels: SP undefined")
    sn = cm.tp / cm.n0
    sp = cm.tn / cm.n1
    flags = ()
    fm_den = 2 * cm.tp + cm.fn + cm.fp
    if fm_den:
        fm = 2 * cm.tp / fm_den
    else:
        fm, flags = 0.0, ("FM",)
    return MetricSet(sn=sn, sp=sp, gm=math.sqrt(sn * sp), fm=fm,
                     acc=(cm.tp + cm.tn) / cm.total, flags=flags)


@dataclass(frozen=True)
class RankTable:
    """Per-measure ranks of each sampler (1 = best) and their mean."""

    ranks: dict
    average: dict
    method: str = "competition"

    @property
    def samplers(self):
        return list(self.average)

    @property
    def measures(self):
        return list(self.ranks)


def _rank_values(values, higher_is_better, method):
    keys = np.asarray(values, dtype=np.float64)
    if higher_is_better:
        keys = -keys
    if method == "competition":
        return [1 + int(np.sum(keys < v)) for v in keys]
    if method == "dense":
        distinct = np.unique(keys)
        return [1 + int(np.searchsorted(distinct, v)) for v in keys]
    raise ValueError(f"unknown rank method {method!r}; use 'competition' or 'dense'")


def rank_table(results, higher_is_better=None, method="competition"):
    """Rank samplers per measure.

    Parameters
    ----------
    results : mapping sampler -> mapping measure -> value
        Values may also be :class:`MetricSet` instances.
    higher_is_better : mapping measure -> bool, optional
        Defaults to True for every measure.
    method : {"competition", "dense"}
        ``"competition"`` gives tied values the shared minimum rank and
        skips the following ranks (1, 1, 3); ``"dense"`` does not skip
        (1, 1, 2).
    """
    table = {s: (v.as_dict() if isinstance(v, MetricSet) else dict(v))
             for s, v in results.items()}
    if not table:
        raise ValueError("no samplers to rank")
    samplers = list(table)
    measures = list(table[samplers[0]])
    for s in samplers:
        missing = set(measures) ^ set(table[s])
        if missing:
            raise ValueError(f"sampler {s!r} is missing measures {sorted(missing)}")
    higher_is_better = higher_is_better or {}

    ranks = {}
    for m in measures:
        r = _rank_values([table[s][m] for s in samplers],
                         higher_is_better.get(m, True), method)
        ranks[m] = dict(zip(samplers, r))
    average = {s: float(np.mean([ranks[m][s] for m in measures])) for s in samplers}
    return RankTable(ranks, average, method)


def mean_ranks(tables):
    """Average several rank tables (e.g. one per dataset) measure by measure."""
    tables = list(tables)
    measures = tables[0].measures
    samplers = tables[0].samplers
    return {m: {s: float(np.mean([t.ranks[m][s] for t in tables])) for s in samplers}
            for m in measures}
