"""Measured quantities along a run.

The free energy of a cloud is ``F(m) + sigma^2/2 H(m|g)``. The relative
entropy is estimated as ``mean U(x_i) - H_diff``, with ``H_diff`` the
Kozachenko-Leonenko k-nearest-neighbour estimate of differential entropy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma, gammaln

from .sampler import gibbs_density_on_grid
from .types import as_positions

KNN_K = 3
# k-NN distances below this are clipped and the estimate is flagged degenerate
DISTANCE_FLOOR = 1e-12
DEGENERATE_DISTANCE = 1e-8


class EntropyEstimate(NamedTuple):
    value: float
    degenerate: bool


@dataclass
class MetricsSnapshot:
    objective_value: float
    validation_error: float
    entropy_rel_g: float
    free_energy: float
    entropy_flagged: bool = False
    aux: dict = field(default_factory=dict)


def validation_error(objective, cloud, validation) -> float:
    """Half mean squared error of the network on a validation set.

    ``validation`` is a :class:`Dataset` whose training pairs are the
    validation points (see ``Dataset.validation``).
    """
    return objective.value(cloud, validation)


def knn_entropy(cloud, k: int = KNN_K) -> EntropyEstimate:
    """Kozachenko-Leonenko differential entropy estimate (nats)."""
    x = as_positions(cloud)
    N, d = x.shape
    if N <= k:
        raise ValueError(f"need more than k={k} particles, got {N}")
    dist, _ = cKDTree(x).query(x, k=k + 1)
    eps = dist[:, -1]
    degenerate = bool(np.any(eps < DEGENERATE_DISTANCE))
    eps = np.maximum(eps, DISTANCE_FLOOR)
    log_unit_ball = 0.5 * d * math.log(math.pi) - gammaln(0.5 * d + 1)
    h = digamma(N) - digamma(k) + log_unit_ball + d * np.mean(np.log(eps))
    return EntropyEstimate(float(h), degenerate)


def entropy_relative_to_g(cloud, objective, k: int = KNN_K) -> EntropyEstimate:
    """Estimate of H(m|g) = E^m[U] - H_diff(m) for the cloud's empirical law."""
    h = knn_entropy(cloud, k)
    mean_u = float(np.mean(objective.reference_potential(as_positions(cloud))))
    return EntropyEstimate(mean_u - h.value, h.degenerate)


def wasserstein1_1d(cloud_a, cloud_b) -> float:
    """Exact W1 between two equal-size 1-D empirical measures."""
    a, b = as_positions(cloud_a), as_positions(cloud_b)
    if a.shape[1] != 1 or b.shape[1] != 1:
        raise ValueError("wasserstein1_1d needs 1-D clouds")
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"clouds differ in size: {a.shape[0]} vs {b.shape[0]}")
    return float(np.mean(np.abs(np.sort(a[:, 0]) - np.sort(b[:, 0]))))


def fixed_point_residual_1d(cloud, objective, dataset, sigma: float, *, L: float = 6.0,
                            nodes: int = 2001, bins: int = 50,
                            hist_range: tuple = (-4.0, 4.0), frozen_cloud=None) -> float:
    """Total-variation distance between a cloud's histogram and its best response.

    The best response is computed for ``frozen_cloud`` (default: the cloud
    itself, which measures departure from the fixed point). Mass that falls
    outside ``hist_range`` cannot be located and is counted as fully
    mismatched.
    """
    x = as_positions(cloud)
    if x.shape[1] != 1:
        raise ValueError("fixed_point_residual_1d needs a 1-D cloud")
    ref = cloud if frozen_cloud is None else frozen_cloud
    grid, p = gibbs_density_on_grid(objective, dataset, ref, sigma, L, nodes)
    lo, hi = hist_range
    counts, edges = np.histogram(x[:, 0], bins=bins, range=(lo, hi))
    width = edges[1] - edges[0]
    outside_q = 1.0 - counts.sum() / x.shape[0]
    # grid nodes inside the window merged with the bin edges, so each segment
    # lies in exactly one bin
    pts = np.union1d(grid[(grid > lo) & (grid < hi)], edges)
    p_pts = np.interp(pts, grid, p, left=0.0, right=0.0)
    seg = np.diff(pts)
    mid = 0.5 * (pts[1:] + pts[:-1])
    h = counts[np.clip(((mid - lo) / width).astype(int), 0, bins - 1)] / (x.shape[0] * width)
    inner = np.sum(0.5 * (np.abs(h - p_pts[:-1]) + np.abs(h - p_pts[1:])) * seg)
    outside_p = max(0.0, 1.0 - np.sum(0.5 * (p_pts[:-1] + p_pts[1:]) * seg))
    return float(0.5 * (inner + outside_p + outside_q))


def free_energy(objective_value: float, entropy_rel_g: float, sigma2_half: float) -> float:
    return objective_value + sigma2_half * entropy_rel_g


def snapshot(objective, dataset, cloud, sigma2_half: float, *, reference=None,
             fixed_point_check: bool = False) -> MetricsSnapshot:
    """All per-epoch metrics for ``cloud``.

    ``reference`` is an equal-size 1-D sample from the known fixed point; when
    given, its W1 distance to the cloud is recorded as ``aux['w1']``.
    ``fixed_point_check`` records the 1-D total-variation residual as
    ``aux['tv']``.
    """
    f = objective.value(cloud, dataset)
    has_val = dataset is not None and hasattr(dataset, "validation_labels")
    val = validation_error(objective, cloud, dataset.validation) if has_val else float("nan")
    ent = entropy_relative_to_g(cloud, objective)
    aux = {}
    if reference is not None:
        aux["w1"] = wasserstein1_1d(cloud, reference)
    if fixed_point_check:
        aux["tv"] = fixed_point_residual_1d(cloud, objective, dataset, math.sqrt(2 * sigma2_half))
    return MetricsSnapshot(f, val, ent.value, free_energy(f, ent.value, sigma2_half), ent.degenerate, aux)
