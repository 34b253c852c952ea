import logging

import numpy as np
import pytest

from sasyno.dataset import Dataset, generate_gaussian_imbalanced, partition_by_class
from sasyno.samplers import (ADASYN, SMOTE, BorderlineSMOTE, NoResampling, RandomDownSampler,
                             SafeLevelSMOTE, SamplerConfig, adasyn, adasyn_allocation,
                             apply_sampler, blsmote, borderline_categories,
                             minority_neighbor_counts, random_downsample, safe_level_gap,
                             slsmote, smote)

from . import oracles


def _part(minority, majority):
    X = np.vstack([minority, majority])
    y = np.r_[np.zeros(len(minority), int), np.ones(len(majority), int)]
    return partition_by_class(Dataset(X, y))


def _on_segments(batch, X0, tol=1e-12):
    a = X0[batch.sources[:, 0]]
    b = X0[batch.sources[:, 1]]
    lam = batch.mix
    return np.all((lam >= 0) & (lam <= 1)) and np.allclose(
        batch.samples, a + lam[:, None] * (b - a), rtol=0, atol=tol)


# -- SMOTE ---------------------------------------------------------------------

def test_smote_zero_gap_returns_base():
    X0 = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]])
    batch = smote(X0, 10, k=2, rng=0)
    zero = batch.samples - X0[batch.sources[:, 0]] - batch.mix[:, None] * (
        X0[batch.sources[:, 1]] - X0[batch.sources[:, 0]])
    assert np.allclose(zero, 0)


def test_smote_two_points_stay_on_segment():
    X0 = np.array([[0.0, 0.0], [2.0, 4.0]])
    batch = smote(X0, 200, k=1, rng=1)
    t = batch.samples[:, 0] / 2.0
    assert np.all((t >= 0) & (t <= 1))
    np.testing.assert_allclose(batch.samples[:, 1], 2 * batch.samples[:, 0])


@pytest.mark.parametrize("seed", range(5))
def test_smote_inside_convex_hull(seed):
    X0 = np.random.default_rng(seed).normal(size=(12, 2))
    batch = smote(X0, 300, k=5, rng=seed)
    assert all(oracles.in_convex_hull_2d(X0.tolist(), s) for s in batch.samples.tolist())


def test_smote_neighbours_are_k_nearest():
    X0 = np.random.default_rng(0).normal(size=(15, 3))
    batch = smote(X0, 400, k=3, rng=0)
    pts = X0.tolist()
    for base, nb in batch.sources:
        nearest = [i for _, i in sorted((np.linalg.norm(X0[base] - p), i)
                                        for i, p in enumerate(pts) if i != base)[:3]]
        assert nb in nearest


def test_smote_caps_k_and_logs(caplog):
    with caplog.at_level(logging.WARNING, logger="sasyno"):
        batch = smote(np.array([[0.0], [1.0], [2.0]]), 5, k=5, rng=0)
    assert len(batch) == 5
    assert "capped from 5 to 2" in caplog.text


def test_smote_rejects_single_sample():
    with pytest.raises(ValueError):
        smote(np.zeros((1, 2)), 3)


# -- ADASYN ---------------------------------------------------------------------

def _adasyn_config():
    # three mutually close minority samples far from everything else, and one
    # minority sample ringed by majority samples
    minority = [[0.0, 0.0], [0.0, 0.1], [0.1, 0.0], [10.0, 0.0]]
    ring = [[10 + 0.5 * np.cos(t), 0.5 * np.sin(t)]
            for t in np.linspace(0, 2 * np.pi, 6, endpoint=False)]
    return _part(np.array(minority), np.array(ring))


def test_adasyn_hand_configuration():
    part = _adasyn_config()
    pts = np.vstack([part.minority.X, part.majority.X]).tolist()
    labels = [0] * 4 + [1] * 6
    r = [sum(oracles.knn_labels(pts, labels, i, 2)) / 2 for i in range(4)]
    assert r == [0.0, 0.0, 0.0, 1.0]
    batch, g = adasyn(part, k=2, rng=0)
    assert g.tolist() == [0, 0, 0, 2]
    assert len(batch) == 2 and set(batch.sources[:, 0]) == {3}


def test_adasyn_uniform_fallback():
    minority = np.array([[0.0], [0.1], [0.2], [0.3]])
    majority = np.array([[100.0 + i] for i in range(11)])
    batch, g = adasyn(_part(minority, majority), k=2, rng=0)
    assert g.sum() == 7 and g.max() - g.min() <= 1


def test_adasyn_balanced_is_empty():
    batch, g = adasyn(_part(np.zeros((3, 1)) + [[0], [1], [2]], np.array([[5.0], [6], [7]])), k=2)
    assert len(batch) == 0 and g.sum() == 0


@pytest.mark.parametrize("seed", range(30))
def test_adasyn_allocation_is_exact(seed):
    rng = np.random.default_rng(seed)
    w = rng.random(int(rng.integers(1, 20)))
    w[rng.random(w.size) < 0.3] = 0
    if w.sum() == 0:
        w[0] = 1
    w /= w.sum()
    total = int(rng.integers(0, 500))
    g = adasyn_allocation(w, total)
    assert g.sum() == total and np.all(g >= 0)
    assert np.all(np.abs(g - w * total) <= 1.5)


def test_adasyn_allocation_overshoot_takes_from_top():
    g = adasyn_allocation(np.full(3, 1 / 3), 2)
    assert g.tolist() == [0, 1, 1]


# -- Borderline-SMOTE ---------------------------------------------------------------

def _five_points():
    minority = np.array([[0.0, 0.0], [0.0, -1.2]])
    majority = np.array([[0.0, 1.0], [1.0, 0.0], [-1.0, 0.0]])
    return _part(minority, majority)


def test_blsmote_hand_categories():
    part = _five_points()
    assert borderline_categories(part, 3).tolist() == ["noise", "danger"]
    batch, danger = blsmote(part, k=3, rng=0)
    assert danger.tolist() == [1]
    assert len(batch) == 1 and batch.sources[0].tolist() == [1, 0]


@pytest.mark.parametrize("seed", range(5))
def test_blsmote_bases_come_from_danger(seed):
    d = generate_gaussian_imbalanced(30, 120, ([0, 0], [1, 1]), (1, 1), rng=seed)
    part = partition_by_class(d)
    pts = np.vstack([part.minority.X, part.majority.X]).tolist()
    labels = [0] * part.n0 + [1] * part.n1
    m = [sum(oracles.knn_labels(pts, labels, i, 5)) for i in range(part.n0)]
    expected = [i for i, c in enumerate(m) if 2.5 <= c < 5]
    batch, danger = blsmote(part, k=5, rng=seed)
    assert danger.tolist() == expected and danger.size
    assert set(batch.sources[:, 0]) <= set(expected)
    assert _on_segments(batch, part.minority.X)


def test_blsmote_falls_back_to_smote():
    minority = np.array([[0.0, 0.0], [0.1, 0.0], [0.0, 0.1], [0.1, 0.1]])
    majority = np.array([[50.0 + i, 50.0] for i in range(10)])
    part = _part(minority, majority)
    batch, danger = blsmote(part, k=3, rng=4)
    assert danger.size == 0
    reference = smote(minority, 6, k=3, rng=4)
    np.testing.assert_array_equal(batch.samples, reference.samples)


# -- Safe-Level-SMOTE -------------------------------------------------------------

def test_safe_level_cases():
    rng = np.random.default_rng(0)
    assert safe_level_gap(0, 0, rng) is None
    assert safe_level_gap(3, 0, rng) == 0.0
    draws = np.array([safe_level_gap(2, 2, rng) for _ in range(2000)])
    assert draws.min() >= 0 and draws.max() <= 1 and draws.min() < 0.05 and draws.max() > 0.95
    draws = np.array([safe_level_gap(4, 2, rng) for _ in range(2000)])
    assert draws.max() <= 0.5
    draws = np.array([safe_level_gap(1, 4, rng) for _ in range(2000)])
    assert draws.min() >= 0.75
    assert safe_level_gap(0, 3, rng) == 1.0


def test_slsmote_noise_neighbour_gives_base():
    # minority 0 sits among minorities, minority 1 is buried in majority
    minority = np.array([[0.0, 0.0], [0.2, 0.0], [0.0, 0.2], [5.0, 5.0]])
    majority = np.array([[5.0 + dx, 5.0 + dy]
                         for dx, dy in [(0.1, 0), (-0.1, 0), (0, 0.1), (0, -0.1), (0.1, 0.1)]])
    part = _part(minority, majority)
    safe = minority_neighbor_counts(part, 2)
    assert safe.tolist() == [2, 2, 2, 0]
    batch = slsmote(part, k=3, rng=0)
    toward_noise = batch.sources[:, 1] == 3
    np.testing.assert_array_equal(batch.samples[toward_noise],
                                  minority[batch.sources[toward_noise, 0]])
    assert not np.any(batch.sources[:, 0] == 3) or np.all(
        batch.mix[batch.sources[:, 0] == 3] == 1.0)


def test_slsmote_all_skip_pads_with_smote(caplog):
    minority = np.array([[0.0, 0.0], [10.0, 0.0]])
    majority = np.array([[0.0, 1.0], [0.0, -1.0], [10.0, 1.0], [10.0, -1.0]])
    part = _part(minority, majority)
    with caplog.at_level(logging.WARNING, logger="sasyno"):
        batch = slsmote(part, k=2, rng=0)
    assert "retry cap" in caplog.text
    assert len(batch) == 2 and _on_segments(batch, minority)


# -- random down-sampling ---------------------------------------------------------

def test_downsample_examples():
    maj = Dataset(np.arange(95.0)[:, None], np.ones(95))
    same = random_downsample(maj, 95, rng=0)
    np.testing.assert_array_equal(np.sort(same.X, axis=0), maj.X)
    five = random_downsample(maj, 5, rng=0)
    assert five.n_samples == 5 and set(five.X[:, 0]) <= set(maj.X[:, 0])
    with pytest.raises(ValueError):
        random_downsample(maj, 96)


# -- common interface -------------------------------------------------------------

def _imbalanced(seed, n0=20, n1=80, m=2):
    rng = np.random.default_rng(seed)
    return generate_gaussian_imbalanced(n0, n1, (np.zeros(m), np.ones(m)), (1.0, 1.0),
                                        rng=rng)


@pytest.mark.parametrize("kind, per_class", [("SASYNO", 80), ("SMOTE", 80), ("ADASYN", 80),
                                             ("BLSMOTE", 80), ("SLSMOTE", 80), ("RDS", 20)])
def test_apply_sampler_balances(kind, per_class):
    d = _imbalanced(0)
    out = apply_sampler(SamplerConfig(kind), d, rng=1)
    assert out.count(0) == out.count(1) == per_class


def test_apply_sampler_orig_is_passthrough():
    d = _imbalanced(0)
    assert apply_sampler(SamplerConfig("orig"), d, rng=0) is d


@pytest.mark.parametrize("kind", ["SASYNO", "SMOTE", "ADASYN", "BLSMOTE", "SLSMOTE", "RDS"])
def test_samplers_deterministic(kind):
    d = _imbalanced(2)
    a = apply_sampler(SamplerConfig(kind), d, rng=5)
    b = apply_sampler(SamplerConfig(kind), d, rng=5)
    np.testing.assert_array_equal(a.X, b.X)
    np.testing.assert_array_equal(a.y, b.y)


@pytest.mark.parametrize("cls", [SMOTE, BorderlineSMOTE, SafeLevelSMOTE])
def test_smote_family_synthetics_on_segments(cls):
    d = _imbalanced(3, 25, 100)
    est = cls(k_neighbors=5, random_state=0)
    est.fit_resample(d.X, d.y)
    assert _on_segments(est.batch_, d.X[d.y == 0])


def test_estimators_expose_params():
    assert SMOTE(k_neighbors=3, random_state=1).get_params() == {"k_neighbors": 3, "random_state": 1}
    assert ADASYN().set_params(k_neighbors=7).k_neighbors == 7
    assert RandomDownSampler(random_state=2).get_params() == {"random_state": 2}
    X, y = NoResampling().fit_resample([[0.0], [1.0]], [0, 1])
    assert X.shape == (2, 1)


def test_sampler_config_validation():
    with pytest.raises(ValueError, match="unknown sampler"):
        SamplerConfig("MWMOTE")
    with pytest.raises(ValueError):
        SamplerConfig("SMOTE", k_neighbors=0)
    assert SamplerConfig("smote").kind == "SMOTE"


def test_apply_sampler_needs_binary():
    d = Dataset(np.zeros((3, 1)), np.array([0, 1, 2]))
    with pytest.raises(ValueError):
        apply_sampler(SamplerConfig("SASYNO"), d)
