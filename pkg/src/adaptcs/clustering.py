"""Seeded k-means++ over flattened uncertainty maps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class CentroidSet:
    centroids: np.ndarray  # (J, *shape)
    assignment: np.ndarray  # (N,) centroid index per training point
    objective_history: list[float]

    @property
    def J(self) -> int:
        return self.centroids.shape[0]


def _sq_dists(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    # explicit differences: exact zeros for coincident points
    return ((x[:, None, :] - c[None, :, :]) ** 2).sum(axis=2)


def kmeans_pp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """D^2-weighted seeding; returns indices of the chosen points."""
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = ((x - x[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            # every point already coincides with a center
            rest = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rest[0]) if rest.size else chosen[-1]
        else:
            nxt = int(rng.choice(n, p=d2 / total))
        chosen.append(nxt)
        d2 = np.minimum(d2, ((x - x[nxt]) ** 2).sum(axis=1))
    return np.asarray(chosen)


def kmeans_pp(points, J: int, seed: int = 0, max_iters: int = 100) -> CentroidSet:
    """k-means++ seeding followed by Lloyd iterations (squared Euclidean).

    Stops when assignments stop changing or after ``max_iters``.  An empty
    cluster is re-seeded with the point farthest from its own centroid.
    """
    if J < 1:
        raise ValueError("J must be at least 1")
    pts = [np.asarray(p, dtype=np.float64) for p in points]
    if not pts:
        raise ValueError("no points to cluster")
    shape = pts[0].shape
    if any(p.shape != shape for p in pts):
        raise ValueError("all points must have the same shape")
    x = np.stack([p.ravel() for p in pts])
    n = x.shape[0]
    rng = np.random.default_rng(seed)

    centers = x[kmeans_pp_init(x, J, rng)].copy()
    labels = None
    history: list[float] = []
    for _ in range(max_iters):
        d = _sq_dists(x, centers)
        new_labels = d.argmin(axis=1)
        history.append(float(d[np.arange(n), new_labels].sum()))
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(J):
            members = labels == j
            if members.any():
                centers[j] = x[members].mean(axis=0)
            else:
                own = ((x - centers[labels]) ** 2).sum(axis=1)
                far = int(np.argmax(own))
                centers[j] = x[far]
                labels[far] = j
    d = _sq_dists(x, centers)
    labels = d.argmin(axis=1)
    return CentroidSet(centers.reshape((J, *shape)), labels, history)
