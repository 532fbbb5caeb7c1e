import numpy as np
import pytest

from adaptcs.clustering import kmeans_pp


def test_single_cluster_is_mean(rng):
    pts = [rng.random((4, 4)) for _ in range(10)]
    res = kmeans_pp(pts, 1, seed=0)
    np.testing.assert_allclose(res.centroids[0], np.mean(pts, axis=0), atol=1e-12)
    assert res.J == 1 and not res.assignment.any()


def test_each_point_own_centroid(rng):
    pts = [rng.random(5) for _ in range(4)]
    res = kmeans_pp(pts, 4, seed=3)
    for i, p in enumerate(pts):
        np.testing.assert_allclose(res.centroids[res.assignment[i]], p, atol=1e-12)
    assert res.objective_history[-1] == 0


def test_planted_blobs_recovered():
    centers = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    for seed in range(20):
        rng = np.random.default_rng(seed)
        truth = np.repeat(np.arange(3), 15)
        pts = centers[truth] + rng.normal(scale=0.5, size=(45, 2))
        res = kmeans_pp(list(pts), 3, seed=seed)
        # same partition up to relabeling
        mapping = {}
        for t, a in zip(truth, res.assignment):
            mapping.setdefault(t, a)
            assert mapping[t] == a
        assert len(set(mapping.values())) == 3


def test_deterministic_and_monotone(rng):
    pts = [rng.random(8) for _ in range(30)]
    a = kmeans_pp(pts, 3, seed=5)
    b = kmeans_pp(pts, 3, seed=5)
    assert np.array_equal(a.centroids, b.centroids)
    assert np.all(np.diff(a.objective_history) <= 1e-12)


def test_more_clusters_than_distinct_points():
    pts = [np.zeros(3), np.zeros(3), np.ones(3)]
    res = kmeans_pp(pts, 3, seed=0)
    assert res.centroids.shape == (3, 3)
    assert np.all(np.isfinite(res.centroids))


def test_errors():
    with pytest.raises(ValueError):
        kmeans_pp([np.zeros(2)], 0)
    with pytest.raises(ValueError):
        kmeans_pp([], 1)
    with pytest.raises(ValueError):
        kmeans_pp([np.zeros(2), np.zeros(3)], 1)
