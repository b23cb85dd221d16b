"""Penalised change-point detection for piecewise-constant signals.

PELT (Killick, Fearnhead & Eckley, 2012) with the L2 cost, plus the plain
quadratic optimal-partitioning recursion it prunes, kept as a reference.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_series

__all__ = ["SegmentCost", "pelt", "optimal_partition", "PeltChangePointDetector"]


class SegmentCost:
    """Sum of squared deviations from the segment mean, O(1) per query."""

    def __init__(self, series):
        y = check_series(series)
        # centring keeps the cumulative sums small
        y = y - (y.mean() if len(y) else 0.0)
        self.n = len(y)
        self._s1 = np.concatenate([[0.0], np.cumsum(y)])
        self._s2 = np.concatenate([[0.0], np.cumsum(y * y)])

    def __call__(self, start: int, end: int) -> float:
        """Cost of ``series[start:end]``."""
        n = end - start
        s1 = self._s1[end] - self._s1[start]
        s2 = self._s2[end] - self._s2[start]
        return max(s2 - s1 * s1 / n, 0.0)


def _backtrack(last: list, n: int) -> list:
    cps = []
    t = n
    while t > 0:
        t = last[t]
        if t > 0:
            cps.append(t)
    return cps[::-1]


def pelt(series, penalty: float, min_segment: int = 1) -> list:
    """Exact penalised segmentation with pruning.

    Returns the sorted start indices of every segment after the first.
    A candidate pruned at time ``t`` is only discarded once ``t`` itself
    becomes admissible (``min_segment`` steps later), which keeps the
    result exact under a minimum segment length.
    """
    if penalty < 0:
        raise ValueError("penalty must be non-negative")
    if min_segment < 1:
        raise ValueError("min_segment must be >= 1")
    cost = SegmentCost(series)
    n = cost.n
    if n < 2 * min_segment:
        return []

    best = np.full(n + 1, np.inf)
    best[0] = -penalty
    last = [0] * (n + 1)
    candidates: list = []  # [tau, expiry]; expiry None while alive
    for t in range(min_segment, n + 1):
        new_tau = t - min_segment
        if new_tau == 0 or new_tau >= min_segment:
            if np.isfinite(best[new_tau]):
                candidates.append([new_tau, None])
        values = [best[tau] + cost(tau, t) + penalty for tau, _ in candidates]
        k = int(np.argmin(values))
        best[t] = values[k]
        last[t] = candidates[k][0]
        kept = []
        for (tau, expiry), v in zip(candidates, values):
            if expiry is not None and t >= expiry:
                continue
            if expiry is None and v - penalty > best[t]:
                expiry = t + min_segment
            kept.append([tau, expiry])
        candidates = kept
    return _backtrack(last, n)


def optimal_partition(series, penalty: float, min_segment: int = 1) -> list:
    """Unpruned O(n^2) dynamic program over all admissible segmentations."""
    cost = SegmentCost(series)
    n = cost.n
    if n < 2 * min_segment:
        return []
    best = np.full(n + 1, np.inf)
    best[0] = -penalty
    last = [0] * (n + 1)
    for t in range(min_segment, n + 1):
        taus = [0] + list(range(min_segment, t - min_segment + 1))
        values = [best[tau] + cost(tau, t) + penalty for tau in taus]
        k = int(np.argmin(values))
        best[t], last[t] = values[k], taus[k]
    return _backtrack(last, n)


def segmentation_cost(series, changepoints, penalty: float) -> float:
    cost = SegmentCost(series)
    bounds = [0, *changepoints, cost.n]
    return sum(cost(a, b) for a, b in zip(bounds, bounds[1:])) + penalty * len(changepoints)


class PeltChangePointDetector(BaseEstimator):
    """Estimator wrapper around :func:`pelt`.

    Parameters
    ----------
    penalty : float
        Cost added per change point.
    min_segment : int
        Minimum number of samples per segment.
    """

    def __init__(self, penalty: float = 0.05, min_segment: int = 3):
        self.penalty = penalty
        self.min_segment = min_segment

    def fit(self, X, y=None):
        series = check_series(X, "X")
        self.n_samples_ = len(series)
        self.changepoints_ = np.asarray(pelt(series, self.penalty, self.min_segment), dtype=int)
        return self

    def predict(self, X):
        """Segment label (0, 1, 2, ...) for every sample."""
        series = check_series(X, "X")
        cps = pelt(series, self.penalty, self.min_segment)
        return np.searchsorted(np.asarray(cps, dtype=int), np.arange(len(series)), side="right")

    def fit_predict(self, X, y=None):
        self.fit(X)
        return np.searchsorted(self.changepoints_, np.arange(self.n_samples_), side="right")
