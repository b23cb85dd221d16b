"""scikit-learn style front ends for the G-code comparators."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_program, check_skeleton
from .equivalence import DEFAULT_TIE_RTOL, compare, nmse_similarity
from .gcode_model import GcodeProgram, Skeleton

__all__ = ["CurveChecker", "NmseBaseline"]


def _as_candidates(X) -> list:
    if isinstance(X, (GcodeProgram, Skeleton, str)):
        return [X]
    return list(X)


def _coerce(obj):
    if isinstance(obj, Skeleton):
        return obj
    return check_program(obj)


class CurveChecker(BaseEstimator):
    """Rotation/translation-invariant similarity against a fitted reference.

    ``fit`` takes the ground truth (program, skeleton, path or text);
    ``transform`` maps candidates to a column of similarity percentages;
    ``report`` returns the full :class:`ComparisonReport` for one candidate.

    Parameters
    ----------
    skip_brim : bool
        Drop the first layer of both sides.
    global_align : bool
        Register layer 0 and reuse that motion for every layer.
    tie_rtol : float
        Relative width (of the ground-truth hull area) of the near-optimal
        rotation band that is re-ranked by DTW cost.
    n_jobs : int
        Worker processes for per-layer scoring.
    """

    def __init__(self, skip_brim=False, global_align=False, tie_rtol=DEFAULT_TIE_RTOL, n_jobs=1):
        self.skip_brim = skip_brim
        self.global_align = global_align
        self.tie_rtol = tie_rtol
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        ref = _coerce(X)
        self.reference_ = ref
        self.skeleton_ = check_skeleton(ref)
        self.n_layers_ = len(self.skeleton_)
        return self

    def report(self, X):
        check_is_fitted(self, "skeleton_")
        cand = _coerce(X)
        check_skeleton(cand)
        return compare(
            self.reference_, cand,
            skip_brim=self.skip_brim, global_align=self.global_align,
            tie_rtol=self.tie_rtol, n_jobs=self.n_jobs,
        )

    def transform(self, X) -> np.ndarray:
        sims = [self.report(c).aggregate_similarity_pct for c in _as_candidates(X)]
        return np.asarray(sims, dtype=float).reshape(-1, 1)

    def score(self, X, y=None) -> float:
        """Mean similarity (percent) of the candidates."""
        return float(self.transform(X).mean())


class NmseBaseline(BaseEstimator):
    """Unaligned nMSE similarity; same interface as :class:`CurveChecker`."""

    def __init__(self, n_samples=256, skip_brim=False):
        self.n_samples = n_samples
        self.skip_brim = skip_brim

    def fit(self, X, y=None):
        self.skeleton_ = check_skeleton(_coerce(X))
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "skeleton_")
        sims = [
            nmse_similarity(self.skeleton_, check_skeleton(_coerce(c)), self.n_samples, self.skip_brim)
            for c in _as_candidates(X)
        ]
        return np.asarray(sims, dtype=float).reshape(-1, 1)

    def score(self, X, y=None) -> float:
        return float(self.transform(X).mean())
