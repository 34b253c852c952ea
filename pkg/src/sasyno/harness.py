"""Monte Carlo comparison of resamplers and disturbance coverage checks."""

import configparser
import csv
import io
import json
import logging
import math
import os
import time
from dataclasses import dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import clone

from .classifiers import KNNClassifier
from .core import gaussian_disturb, interpolate
from .dataset import (Dataset, fit_minmax, generate_gaussian_imbalanced, load_csv,
                      partition_by_class, train_test_split)
from .metrics import MEASURES, MetricSet, confusion_matrix, metrics, rank_table
from .samplers import SamplerConfig, apply_sampler

logger = logging.getLogger(__name__)

_SPLIT, _SAMPLER, _GENERATOR = 0, 1, 2


def derive_seed(master_seed, *key):
    """Independent child stream for ``key`` (pure function of its inputs)."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))


@dataclass
class ExperimentConfig:
    """Everything one Monte Carlo comparison needs.

    The data come from ``dataset`` (an in-memory :class:`Dataset`),
    ``data_path`` (CSV) or ``generator`` (keyword arguments of
    :func:`generate_gaussian_imbalanced` without ``rng``), in that order
    of precedence. ``test_path`` / ``test_dataset`` switch to a fixed
    train/test pair. ``classifier`` is any estimator with ``fit`` and
    ``predict``; it is cloned for every run.
    """

    samplers: list = field(default_factory=lambda: [SamplerConfig("SASYNO")])
    dataset: Dataset = None
    data_path: str = None
    label_column: object = -1
    generator: dict = None
    test_path: str = None
    test_dataset: Dataset = None
    train_fraction: float = 0.8
    resplit: bool = True
    classifier: object = field(default_factory=lambda: KNNClassifier(n_neighbors=1))
    replicates: int = 10
    master_seed: int = 0
    normalize: bool = False
    report_dir: str = None
    rank_method: str = "competition"
    n_jobs: int = 1

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if not self.samplers:
            raise ValueError("at least one sampler is required")
        self.samplers = [s if isinstance(s, SamplerConfig) else SamplerConfig(s)
                         for s in self.samplers]
        names = [s.label for s in self.samplers]
        if len(set(names)) != len(names):
            raise ValueError(f"sampler names must be unique, got {names}")


def _parse_bool(value):
    value = value.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _parse_vector(value):
    return [float(v) for v in value.replace(";", ",").split(",") if v.strip()]


CONFIG_KEYS = {
    "dataset.path", "dataset.label_column", "dataset.generator", "dataset.n0",
    "dataset.n1", "dataset.center0", "dataset.center1", "dataset.spread0",
    "dataset.spread1", "split.fraction", "split.pre_split_test", "split.resplit",
    "samplers", "samplers.k", "classifier.kind", "classifier.k", "replicates",
    "seed", "normalize", "report.dir", "report.rank_method", "jobs",
}


def parse_config(text, base_dir="."):
    """Build an :class:`ExperimentConfig` from ``key = value`` lines.

    ``#`` starts a comment. Relative paths are resolved against
    ``base_dir``. See the README for the key list.
    """
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#",),
                                       inline_comment_prefixes=("#",))
    parser.optionxform = str
    parser.read_string("[experiment]\n" + text)
    raw = dict(parser["experiment"])
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")

    def path(key):
        value = raw.get(key)
        if not value:
            return None
        return value if os.path.isabs(value) else os.path.join(base_dir, value)

    kwargs = {}
    if "dataset.path" in raw:
        kwargs["data_path"] = path("dataset.path")
    elif raw.get("dataset.generator", "gaussian") == "gaussian" and "dataset.n0" in raw:
        kwargs["generator"] = {
            "n0": int(raw["dataset.n0"]),
            "n1": int(raw["dataset.n1"]),
            "centers": (_parse_vector(raw["dataset.center0"]),
                        _parse_vector(raw["dataset.center1"])),
            "spreads": (float(raw.get("dataset.spread0", 1.0)),
                        float(raw.get("dataset.spread1", 1.0))),
        }
    else:
        raise ValueError("config needs dataset.path or a gaussian generator (dataset.n0, ...)")
    if "dataset.label_column" in raw:
        kwargs["label_column"] = raw["dataset.label_column"]
    if "split.fraction" in raw:
        kwargs["train_fraction"] = float(raw["split.fraction"])
    if "split.pre_split_test" in raw:
        kwargs["test_path"] = path("split.pre_split_test")
    if "split.resplit" in raw:
        kwargs["resplit"] = _parse_bool(raw["split.resplit"])

    k = int(raw.get("samplers.k", 5))
    kinds = [s.strip() for s in raw.get("samplers", "sasyno").split(",") if s.strip()]
    kwargs["samplers"] = [SamplerConfig(kind, k_neighbors=k) for kind in kinds]

    kind = raw.get("classifier.kind", "knn").strip().lower()
    if kind != "knn":
        raise ValueError(f"unsupported classifier.kind {kind!r}; only 'knn' is built in")
    kwargs["classifier"] = KNNClassifier(n_neighbors=int(raw.get("classifier.k", 1)))

    if "replicates" in raw:
        kwargs["replicates"] = int(raw["replicates"])
    if "seed" in raw:
        kwargs["master_seed"] = int(raw["seed"])
    if "normalize" in raw:
        kwargs["normalize"] = _parse_bool(raw["normalize"])
    if "report.dir" in raw:
        kwargs["report_dir"] = path("report.dir")
    if "report.rank_method" in raw:
        kwargs["rank_method"] = raw["report.rank_method"].strip().lower()
    if "jobs" in raw:
        kwargs["n_jobs"] = int(raw["jobs"])
    return ExperimentConfig(**kwargs)


def load_config(filename):
    with open(filename, encoding="utf-8") as fh:
        return parse_config(fh.read(), os.path.dirname(os.path.abspath(filename)))


@dataclass(frozen=True)
class RunResult:
    sampler: str
    replicate: int
    metrics: MetricSet
    confusion: object
    train_size: int
    seconds: float = field(compare=False)


@dataclass
class ExperimentReport:
    """Replicate-level metrics, their per-sampler means and a rank table."""

    runs: list
    means: dict
    ranks: object
    metadata: dict

    @property
    def samplers(self):
        return list(self.means)

    def long_rows(self):
        """``(sampler, replicate, metric, value)`` rows in a fixed order."""
        for run in self.runs:
            for name, value in run.metrics.as_dict().items():
                yield run.sampler, run.replicate, name, value

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["sampler", "replicate", "metric", "value"])
        for sampler, replicate, name, value in self.long_rows():
            writer.writerow([sampler, replicate, name, repr(float(value))])
        return buf.getvalue()

    def format_table(self):
        """Column-aligned table of means, with each sampler's ranks underneath."""
        width = max(9, *(len(s) for s in self.samplers)) + 2
        lines = ["Algorithm".ljust(width) + "".join(m.rjust(9) for m in MEASURES)]
        for s in self.samplers:
            values = self.means[s].as_dict()
            lines.append(s.ljust(width) + "".join(f"{values[m]:9.4f}" for m in MEASURES))
            lines.append(" " * width + "".join(f"{self.ranks.ranks[m][s]:9d}" for m in MEASURES))
        lines.append("")
        lines.append("Average rank")
        for s in self.samplers:
            lines.append(s.ljust(width) + f"{self.ranks.average[s]:9.2f}")
        return "\n".join(lines) + "\n"

    def write(self, report_dir):
        """Write ``report.csv``, ``report.txt`` and ``metadata.json``; returns the paths."""
        os.makedirs(report_dir, exist_ok=True)
        paths = {name: os.path.join(report_dir, name)
                 for name in ("report.csv", "report.txt", "metadata.json")}
        with open(paths["report.csv"], "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())
        with open(paths["report.txt"], "w", encoding="utf-8") as fh:
            fh.write(self.format_table())
        with open(paths["metadata.json"], "w", encoding="utf-8") as fh:
            json.dump(self.metadata, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
        return paths


class _WarningCollector(logging.Handler):
    def __init__(self):
        super().__init__(logging.WARNING)
        self.messages = []

    def emit(self, record):
        self.messages.append(record.getMessage())


def _load_data(config):
    if config.dataset is not None:
        data = config.dataset
    elif config.data_path is not None:
        data = load_csv(config.data_path, config.label_column)
    elif config.generator is not None:
        data = generate_gaussian_imbalanced(
            rng=derive_seed(config.master_seed, _GENERATOR), **config.generator)
    else:
        raise ValueError("no dataset configured")
    test = config.test_dataset
    if test is None and config.test_path is not None:
        test = load_csv(config.test_path, config.label_column)
    return data, test


def _split_for(config, data, test, replicate):
    if test is not None:
        return data, test
    r = replicate if config.resplit else 0
    return train_test_split(data, config.train_fraction, derive_seed(config.master_seed, _SPLIT, r))


def _run_replicate(config, data, test, replicate):
    train, test = _split_for(config, data, test, replicate)
    if config.normalize:
        params = fit_minmax(train.X)
        train, test = params.apply(train), params.apply(test)
    part = partition_by_class(train)
    results = []
    for s_idx, sampler in enumerate(config.samplers):
        start = time.perf_counter()
        rng = derive_seed(config.master_seed, _SAMPLER, replicate, s_idx)
        resampled = apply_sampler(sampler, train, rng)
        model = clone(config.classifier)
        if "minority_label" in model.get_params():
            model.set_params(minority_label=part.minority_label)
        model.fit(resampled.X, resampled.y)
        predicted = model.predict(test.X)
        cm = confusion_matrix(test.y, predicted, part.minority_label, part.majority_label)
        results.append(RunResult(sampler.label, replicate, metrics(cm), cm,
                                 resampled.n_samples, time.perf_counter() - start))
    return results


def run_experiment(config):
    """Run every sampler on every replicate and aggregate the metrics.

    Each replicate draws its split from ``(seed, replicate)`` and each
    sampler run its randomness from ``(seed, replicate, sampler index)``,
    so results do not depend on execution order or ``n_jobs``.
    """
    data, test = _load_data(config)
    collector = _WarningCollector()
    package_logger = logging.getLogger("sasyno")
    package_logger.addHandler(collector)
    try:
        per_replicate = Parallel(n_jobs=config.n_jobs, prefer="threads")(
            delayed(_run_replicate)(config, data, test, r) for r in range(config.replicates)
        )
    finally:
        package_logger.removeHandler(collector)

    order = {s.label: i for i, s in enumerate(config.samplers)}
    runs = sorted((run for batch in per_replicate for run in batch),
                  key=lambda run: (order[run.sampler], run.replicate))
    means = {s.label: MetricSet.mean(run.metrics for run in runs if run.sampler == s.label)
             for s in config.samplers}
    metadata = {
        "master_seed": config.master_seed,
        "replicates": config.replicates,
        "samplers": [{"name": s.label, "kind": s.kind, "k_neighbors": s.k_neighbors}
                     for s in config.samplers],
        "train_fraction": config.train_fraction,
        "resplit": config.resplit,
        "pre_split": test is not None,
        "normalize": config.normalize,
        "rank_method": config.rank_method,
        "classifier": repr(config.classifier),
        "warnings": sorted(set(collector.messages)),
        "timings_seconds": {s.label: [run.seconds for run in runs if run.sampler == s.label]
                            for s in config.samplers},
    }
    return ExperimentReport(runs, means, rank_table(means, method=config.rank_method), metadata)


# -- disturbance coverage ------------------------------------------------------

GAUSS_2SIGMA = math.erf(2 / math.sqrt(2))
GAUSS_3SIGMA = math.erf(3 / math.sqrt(2))


@dataclass(frozen=True)
class DisturbanceCoverage:
    """Observed coverage of the Gaussian jitter and of the 3-sigma box.

    ``within_2sigma`` / ``within_3sigma`` are per-dimension fractions of
    draws with ``|g_l| <= 2 sigma_l`` / ``3 sigma_l``; ``capsule`` is the
    fraction of synthetics inside the pair's bounding box grown by
    ``3 sigma_l`` in every dimension.
    """

    sigma: np.ndarray
    n_draws: int
    within_2sigma: np.ndarray
    within_3sigma: np.ndarray
    capsule: float
    tol_2sigma: float = 0.005
    tol_3sigma: float = 0.002
    capsule_min: float = 0.988

    @property
    def checks(self):
        active = self.sigma > 0
        return {
            "2sigma": bool(np.all(np.abs(self.within_2sigma[active] - GAUSS_2SIGMA)
                                  <= self.tol_2sigma)),
            "3sigma": bool(np.all(np.abs(self.within_3sigma[active] - GAUSS_3SIGMA)
                                  <= self.tol_3sigma)),
            "capsule": self.capsule >= self.capsule_min,
        }

    @property
    def passed(self):
        return all(self.checks.values())

    def format(self):
        lines = [f"draws: {self.n_draws}",
                 f"{'dim':>4} {'sigma':>10} {'|g|<=2s':>9} {'|g|<=3s':>9}"]
        for l, (s, c2, c3) in enumerate(zip(self.sigma, self.within_2sigma, self.within_3sigma)):
            lines.append(f"{l + 1:>4} {s:>10.4g} {c2:>9.4f} {c3:>9.4f}")
        lines.append(f"expected 2s {GAUSS_2SIGMA:.4f} +/- {self.tol_2sigma}, "
                     f"3s {GAUSS_3SIGMA:.4f} +/- {self.tol_3sigma}")
        lines.append(f"3-sigma box coverage: {self.capsule:.4f} (min {self.capsule_min})")
        for name, ok in self.checks.items():
            lines.append(f"{name}: {'PASS' if ok else 'FAIL'}")
        return "\n".join(lines) + "\n"


def validate_disturbance(m, sigma=None, n_draws=100_000, rng=None, pair=None, **tolerances):
    """Empirical coverage of the SASYNO jitter-and-mix step for one pair.

    Parameters
    ----------
    m : int
        Dimensionality.
    sigma : array-like of length ``m``, optional
        Per-attribute jitter scales (default all ones).
    n_draws : int
        Number of synthetics, at least 10**4.
    pair : (p, q), optional
        Test pair; defaults to the origin and ``4 * sigma`` (1 where
        ``sigma`` is 0).
    **tolerances
        Overrides for ``tol_2sigma``, ``tol_3sigma`` and ``capsule_min``.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if n_draws < 10_000:
        raise ValueError(f"n_draws must be >= 10000, got {n_draws}")
    sigma = np.ones(m) if sigma is None else np.asarray(sigma, dtype=np.float64)
    if sigma.shape != (m,):
        raise ValueError(f"sigma must have length {m}")
    if pair is None:
        p = np.zeros(m)
        q = np.where(sigma > 0, 4 * sigma, 1.0)
    else:
        p, q = (np.asarray(v, dtype=np.float64) for v in pair)
    rng = np.random.default_rng(rng)

    P = np.broadcast_to(p, (n_draws, m))
    Q = np.broadcast_to(q, (n_draws, m))
    p_hat, q_hat = gaussian_disturb(P, Q, sigma, rng)
    s = interpolate(p_hat, q_hat, rng)

    g = np.abs(p_hat - P)
    within2 = np.mean(g <= 2 * sigma, axis=0)
    within3 = np.mean(g <= 3 * sigma, axis=0)
    lo = np.minimum(p, q) - 3 * sigma
    hi = np.maximum(p, q) + 3 * sigma
    capsule = float(np.mean(np.all((s >= lo) & (s <= hi), axis=1)))
    return DisturbanceCoverage(sigma, n_draws, within2, within3, capsule, **tolerances)


def with_seed(config, seed):
    return replace(config, master_seed=seed)
