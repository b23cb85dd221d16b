"""Rotation- and translation-invariant G-code comparison.

Each layer's trajectory is enclosed in its convex hull. The candidate hull
is shifted onto the ground-truth hull centroid and then turned, one degree
at a time, to the angle where the area of the two hulls' union is closest
to the ground-truth hull area (maximum overlap). The enclosed points ride
along rigidly. What remains is scored with subsequence DTW and normalised
to a percentage; per-layer scores are averaged and a height penalty is
added for a layer-count mismatch.

An arc-length-resampled nMSE score with no alignment is provided as the
non-invariant baseline.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ._validation import check_points
from .gcode_model import GcodeProgram, Layer, Skeleton, extract_skeleton
from .geometry import (
    Polygon,
    _intersection_area,
    bounding_diagonal,
    convex_hull,
    polygon_area,
    polygon_centroid,
    rotate_points,
    union_area,
)

__all__ = [
    "SCHEMA_VERSION",
    "AlignmentResult",
    "LayerScore",
    "ComparisonReport",
    "rotation_objectives",
    "best_rotation",
    "align_layer",
    "subsequence_dtw",
    "layer_dissimilarity",
    "compare",
    "resample_polyline",
    "nmse_layer_similarity",
    "nmse_similarity",
]

SCHEMA_VERSION = 1
ANGLES = 360
DEFAULT_TIE_RTOL = 0.05
NMSE_SAMPLES = 256


@dataclass(frozen=True)
class AlignmentResult:
    translation: Tuple[float, float]
    rotation_deg: int
    fused_area: float
    gt_area: float
    objective: float
    degenerate: bool = False


@dataclass(frozen=True)
class LayerScore:
    layer_index: int
    gt_z: Optional[float]
    dissimilarity_pct: float
    alignment: Optional[AlignmentResult]
    raw_dtw: Optional[float]
    cand_z: Optional[float] = None

    @property
    def paired(self) -> bool:
        return self.alignment is not None


@dataclass
class ComparisonReport:
    per_layer: List[LayerScore]
    aggregate_dissimilarity_pct: float
    aggregate_similarity_pct: float
    height_penalty_pct: float
    gt_layer_count: int
    cand_layer_count: int
    gt_instruction_count: int
    cand_instruction_count: int
    instruction_overhead_ratio: float
    nmse_similarity_pct: Optional[float] = None
    options: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"schema_version": SCHEMA_VERSION}
        out.update(asdict(self))
        return out

    def csv_rows(self) -> list:
        rows = []
        for s in self.per_layer:
            a = s.alignment
            rows.append({
                "layer_index": s.layer_index,
                "gt_z": s.gt_z,
                "cand_z": s.cand_z,
                "dissimilarity_pct": s.dissimilarity_pct,
                "raw_dtw": s.raw_dtw,
                "dx": a.translation[0] if a else None,
                "dy": a.translation[1] if a else None,
                "rotation_deg": a.rotation_deg if a else None,
                "fused_area": a.fused_area if a else None,
                "gt_area": a.gt_area if a else None,
                "objective": a.objective if a else None,
                "degenerate": a.degenerate if a else None,
            })
        return rows


# -- rotation search ---------------------------------------------------------

def rotation_objectives(gt_poly: Polygon, cand_poly: Polygon, pivot=None):
    """|union area - gt area| for the candidate turned by 0..359 degrees.

    Returns ``(objective, fused_area)``, both of length 360 and indexed by
    angle; index 0 is the 360-degree turn.
    """
    if gt_poly.degenerate or cand_poly.degenerate:
        raise ValueError("rotation search needs two non-degenerate polygons")
    if pivot is None:
        pivot = polygon_centroid(gt_poly)
    gt_area = polygon_area(gt_poly)
    cand_area = polygon_area(cand_poly)
    verts = cand_poly.as_array() - np.asarray(pivot, dtype=float)
    rad = np.radians(np.arange(1, ANGLES + 1))
    c, s = np.cos(rad), np.sin(rad)
    xs = verts[:, 0][None, :] * c[:, None] - verts[:, 1][None, :] * s[:, None] + pivot[0]
    ys = verts[:, 0][None, :] * s[:, None] + verts[:, 1][None, :] * c[:, None] + pivot[1]
    clip_by = gt_poly.vertices
    fused = np.empty(ANGLES)
    for k in range(ANGLES):
        rotated = list(zip(xs[k].tolist(), ys[k].tolist()))
        inter = _intersection_area(rotated, clip_by)
        fused[(k + 1) % ANGLES] = gt_area + cand_area - inter
    return np.abs(fused - gt_area), fused


def _tie_atol(gt_area: float) -> float:
    return 1e-9 * max(gt_area, 1.0)


def best_rotation(gt_poly: Polygon, cand_poly: Polygon, pivot=None) -> AlignmentResult:
    """Integer angle (0-359) minimising |union area - gt area|.

    Angles within a 1e-9 relative tolerance of the minimum count as tied;
    the smallest tied angle wins, with a full turn reported as 0.
    """
    objective, fused = rotation_objectives(gt_poly, cand_poly, pivot)
    gt_area = polygon_area(gt_poly)
    best = objective.min()
    angle = int(np.flatnonzero(objective <= best + _tie_atol(gt_area))[0])
    return AlignmentResult((0.0, 0.0), angle, float(fused[angle]), gt_area, float(objective[angle]))


def _candidate_angles(objective: np.ndarray, gt_area: float, tie_rtol: float) -> np.ndarray:
    # circular local minima close enough to the global minimum
    best = objective.min()
    limit = best + max(tie_rtol * gt_area, _tie_atol(gt_area))
    left = np.roll(objective, 1)
    right = np.roll(objective, -1)
    local = (objective <= left) & (objective <= right)
    cands = np.flatnonzero(local & (objective <= limit))
    exact = np.flatnonzero(objective <= best + _tie_atol(gt_area))
    cands = np.union1d(cands, exact)
    if len(cands) > 24:
        cands = np.sort(cands[np.argsort(objective[cands], kind="stable")[:24]])
    return cands


# -- DTW -----------------------------------------------------------------------

def _subsequence_cost(reference: np.ndarray, query: np.ndarray) -> float:
    n, m = len(query), len(reference)
    local = np.hypot(query[:, None, 0] - reference[None, :, 0],
                     query[:, None, 1] - reference[None, :, 1])
    acc = np.full((n + 1, m + 1), np.inf)
    acc[0, :] = 0.0  # free start anywhere along the reference
    for d in range(2, n + m + 1):
        i = np.arange(max(1, d - m), min(n, d - 1) + 1)
        j = d - i
        acc[i, j] = local[i - 1, j - 1] + np.minimum(
            np.minimum(acc[i - 1, j - 1], acc[i - 1, j]), acc[i, j - 1]
        )
    return float(acc[n, 1:].min())


def subsequence_dtw(reference, query) -> float:
    """Subsequence DTW cost with Euclidean local distance.

    The shorter sequence is matched against the best contiguous stretch
    of the longer one (free start and end), using the symmetric
    match/insert/delete step pattern with no window. On equal lengths
    ``reference`` plays the long role.
    """
    ref = check_points(reference, "reference")
    qry = check_points(query, "query")
    if len(qry) > len(ref):
        ref, qry = qry, ref
    return _subsequence_cost(ref, qry)


# -- alignment and scoring ---------------------------------------------------------

def _as_points(layer) -> np.ndarray:
    if isinstance(layer, Layer):
        return np.asarray(layer.points, dtype=float).reshape(-1, 2)
    return check_points(layer, allow_empty=True)


def _align(gt_pts: np.ndarray, cand_pts: np.ndarray, tie_rtol: float):
    gt_hull = convex_hull(gt_pts)
    cand_hull = convex_hull(cand_pts)
    gt_c = np.asarray(polygon_centroid(gt_hull))
    shift = gt_c - np.asarray(polygon_centroid(cand_hull))
    shifted = cand_pts + shift
    moved_hull = Polygon(tuple(map(tuple, cand_hull.as_array() + shift)))
    gt_area = polygon_area(gt_hull)

    if gt_hull.degenerate or moved_hull.degenerate:
        raw = _subsequence_pair(gt_pts, shifted)
        result = AlignmentResult(
            (float(shift[0]), float(shift[1])), 0,
            float(union_area(gt_hull, moved_hull)), float(gt_area),
            float(abs(union_area(gt_hull, moved_hull) - gt_area)), True,
        )
        return result, shifted, raw

    objective, fused = rotation_objectives(gt_hull, moved_hull, gt_c)
    best_angle, best_pts, best_raw = None, None, math.inf
    for angle in _candidate_angles(objective, gt_area, tie_rtol):
        pts = rotate_points(shifted, gt_c, float(angle)) if angle else shifted
        raw = _subsequence_pair(gt_pts, pts)
        # strict improvement only, so equal costs keep the smaller angle
        if raw < best_raw - 1e-12 * max(best_raw, 1.0) or best_angle is None:
            best_angle, best_pts, best_raw = int(angle), pts, raw
    result = AlignmentResult(
        (float(shift[0]), float(shift[1])), best_angle,
        float(fused[best_angle]), float(gt_area), float(objective[best_angle]),
    )
    return result, best_pts, best_raw


def _subsequence_pair(gt_pts, cand_pts) -> float:
    if len(cand_pts) > len(gt_pts):
        return _subsequence_cost(cand_pts, gt_pts)
    return _subsequence_cost(gt_pts, cand_pts)


def align_layer(gt, cand, tie_rtol: float = DEFAULT_TIE_RTOL):
    """Rigidly register a candidate layer onto a ground-truth layer.

    The candidate is translated so the hull centroids coincide, then
    rotated about that common centroid. The rotation is chosen among the
    near-optimal maximum-overlap angles (circular local minima of the
    union-area objective within ``tie_rtol`` x gt hull area of the best)
    as the one with the lowest subsequence-DTW cost; with no near-ties
    this is exactly the maximum-overlap angle.

    Returns
    -------
    (AlignmentResult, ndarray)
        Alignment parameters and the transformed candidate points.
    """
    gt_pts, cand_pts = _as_points(gt), _as_points(cand)
    if len(gt_pts) == 0 or len(cand_pts) == 0:
        raise ValueError("align_layer needs two non-empty layers")
    result, pts, _ = _align(gt_pts, cand_pts, tie_rtol)
    return result, pts


def _percentage(raw: float, n_gt: int, diag: float) -> float:
    if raw == 0.0:
        return 0.0
    if diag <= 0.0 or n_gt == 0:
        return 100.0
    return float(min(max(100.0 * raw / (n_gt * diag), 0.0), 100.0))


def layer_dissimilarity(gt, cand, layer_index: int = 0, tie_rtol: float = DEFAULT_TIE_RTOL) -> LayerScore:
    """Percentage dissimilarity of two layers after alignment.

    ``100 * dtw / (N_gt * D_gt)`` clipped to [0, 100], where ``N_gt`` is
    the ground-truth point count and ``D_gt`` the diagonal of its
    axis-aligned bounding box.
    """
    gt_pts, cand_pts = _as_points(gt), _as_points(cand)
    gt_z = gt.z if isinstance(gt, Layer) else None
    cand_z = cand.z if isinstance(cand, Layer) else None
    if len(gt_pts) == 0:
        raise ValueError("ground-truth layer is empty")
    if len(cand_pts) == 0:
        return LayerScore(layer_index, gt_z, 100.0, None, None, cand_z)
    alignment, _, raw = _align(gt_pts, cand_pts, tie_rtol)
    pct = _percentage(raw, len(gt_pts), bounding_diagonal(gt_pts))
    return LayerScore(layer_index, gt_z, pct, alignment, raw, cand_z)


def _score_pair(args):
    idx, gt, cand, tie_rtol = args
    return layer_dissimilarity(gt, cand, idx, tie_rtol)


def _global_scores(gt_layers, cand_layers, tie_rtol) -> list:
    # register layer 0, then apply that same motion to every layer
    first_gt = _as_points(gt_layers[0])
    result, _, _ = _align(first_gt, _as_points(cand_layers[0]), tie_rtol)
    pivot = polygon_centroid(convex_hull(first_gt))
    scores = []
    for idx, (g, c) in enumerate(zip(gt_layers, cand_layers)):
        g_pts = _as_points(g)
        c_pts = _as_points(c) + np.asarray(result.translation)
        c_pts = rotate_points(c_pts, pivot, float(result.rotation_deg))
        raw = _subsequence_pair(g_pts, c_pts)
        pct = _percentage(raw, len(g_pts), bounding_diagonal(g_pts))
        scores.append(LayerScore(idx, g.z, pct, result, raw, c.z))
    return scores


def _instruction_count(obj) -> Optional[int]:
    if isinstance(obj, GcodeProgram):
        return obj.move_count
    return None


def _skeleton_of(obj) -> Skeleton:
    if isinstance(obj, Skeleton):
        return obj
    if isinstance(obj, GcodeProgram):
        return extract_skeleton(obj)
    raise TypeError(f"expected Skeleton or GcodeProgram, got {type(obj).__name__}")


def compare(
    gt,
    cand,
    *,
    skip_brim: bool = False,
    global_align: bool = False,
    tie_rtol: float = DEFAULT_TIE_RTOL,
    n_jobs: int = 1,
    gt_instruction_count: Optional[int] = None,
    cand_instruction_count: Optional[int] = None,
) -> ComparisonReport:
    """Compare two skeletons (or programs) layer by layer.

    Layers are paired by index; every unpaired layer scores 100 %. The
    aggregate is the mean over all layers plus a height penalty of
    ``100 * |n_gt - n_cand| / max(n_gt, n_cand)``, clipped to [0, 100].
    Instruction counts default to the number of movement lines when
    programs are passed, and to the skeleton point count otherwise.
    """
    gt_sk, cand_sk = _skeleton_of(gt), _skeleton_of(cand)
    if gt_instruction_count is None:
        gt_instruction_count = _instruction_count(gt) or gt_sk.point_count
    if cand_instruction_count is None:
        cand_instruction_count = _instruction_count(cand) or cand_sk.point_count
    gt_layers = list(gt_sk.layers)
    cand_layers = list(cand_sk.layers)
    if skip_brim:
        gt_layers, cand_layers = gt_layers[1:], cand_layers[1:]
    if not gt_layers or not cand_layers:
        raise ValueError("cannot compare an empty skeleton")

    paired = min(len(gt_layers), len(cand_layers))
    if global_align:
        scores = _global_scores(gt_layers[:paired], cand_layers[:paired], tie_rtol)
    else:
        jobs = [(i, gt_layers[i], cand_layers[i], tie_rtol) for i in range(paired)]
        if n_jobs is not None and n_jobs != 1 and paired > 1:
            workers = None if n_jobs < 0 else n_jobs
            with ProcessPoolExecutor(max_workers=workers) as pool:
                scores = list(pool.map(_score_pair, jobs))
        else:
            scores = [_score_pair(j) for j in jobs]

    for i in range(paired, max(len(gt_layers), len(cand_layers))):
        g = gt_layers[i] if i < len(gt_layers) else None
        c = cand_layers[i] if i < len(cand_layers) else None
        scores.append(LayerScore(i, g.z if g else None, 100.0, None, None, c.z if c else None))

    n_gt, n_cand = len(gt_layers), len(cand_layers)
    mean = float(np.mean([s.dissimilarity_pct for s in scores]))
    penalty = 100.0 * abs(n_gt - n_cand) / max(n_gt, n_cand)
    aggregate = min(max(mean + penalty, 0.0), 100.0)
    return ComparisonReport(
        per_layer=scores,
        aggregate_dissimilarity_pct=aggregate,
        aggregate_similarity_pct=100.0 - aggregate,
        height_penalty_pct=penalty,
        gt_layer_count=n_gt,
        cand_layer_count=n_cand,
        gt_instruction_count=int(gt_instruction_count),
        cand_instruction_count=int(cand_instruction_count),
        instruction_overhead_ratio=(
            cand_instruction_count / gt_instruction_count if gt_instruction_count else math.inf
        ),
        options={"skip_brim": skip_brim, "global_align": global_align, "tie_rtol": tie_rtol},
    )


# -- nMSE baseline ------------------------------------------------------------

def resample_polyline(points, k: int = NMSE_SAMPLES) -> np.ndarray:
    """``k`` points equally spaced by arc length along an open polyline."""
    pts = check_points(points)
    if len(pts) == 1:
        return np.repeat(pts, k, axis=0)
    seg = np.hypot(*np.diff(pts, axis=0).T)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    if s[-1] == 0.0:
        return np.repeat(pts[:1], k, axis=0)
    t = np.linspace(0.0, s[-1], k)
    return np.column_stack([np.interp(t, s, pts[:, 0]), np.interp(t, s, pts[:, 1])])


def nmse_layer_similarity(gt, cand, k: int = NMSE_SAMPLES) -> float:
    gt_pts, cand_pts = _as_points(gt), _as_points(cand)
    if len(cand_pts) == 0:
        return 0.0
    a, b = resample_polyline(gt_pts, k), resample_polyline(cand_pts, k)
    mse = float(np.mean(np.sum((a - b) ** 2, axis=1)))
    diag = bounding_diagonal(gt_pts)
    if mse == 0.0:
        nmse = 0.0
    elif diag == 0.0:
        nmse = 1.0
    else:
        nmse = mse / diag ** 2
    return 100.0 * (1.0 - min(max(nmse, 0.0), 1.0))


def nmse_similarity(gt, cand, k: int = NMSE_SAMPLES, skip_brim: bool = False) -> float:
    """Mean per-layer nMSE similarity (percent) with no alignment.

    Layers are paired by index; unpaired layers count as 0 %.
    """
    gt_layers = list(_skeleton_of(gt).layers)
    cand_layers = list(_skeleton_of(cand).layers)
    if skip_brim:
        gt_layers, cand_layers = gt_layers[1:], cand_layers[1:]
    if not gt_layers or not cand_layers:
        raise ValueError("cannot compare an empty skeleton")
    sims = [nmse_layer_similarity(g, c, k) for g, c in zip(gt_layers, cand_layers)]
    total = max(len(gt_layers), len(cand_layers))
    return float(sum(sims) / total)
