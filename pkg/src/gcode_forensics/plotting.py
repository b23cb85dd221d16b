"""Deterministic SVG overlays of layer trajectories."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

GT_COLOR = "blue"
CAND_COLOR = "red"


def _fmt(v: float) -> str:
    text = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def layer_overlay_svg(gt_points, cand_points, title: str = "", size: int = 512, margin: int = 16) -> str:
    """Ground truth in blue, candidate in red, y axis pointing up."""
    gt = np.asarray(gt_points, dtype=float).reshape(-1, 2)
    cand = np.asarray(cand_points, dtype=float).reshape(-1, 2)
    both = np.vstack([p for p in (gt, cand) if len(p)]) if (len(gt) or len(cand)) else np.zeros((1, 2))
    lo, hi = both.min(axis=0), both.max(axis=0)
    span = max(float((hi - lo).max()), 1e-9)
    scale = (size - 2 * margin) / span

    def path(points: np.ndarray, color: str, label: str) -> str:
        if len(points) == 0:
            return ""
        xs = margin + (points[:, 0] - lo[0]) * scale
        ys = size - margin - (points[:, 1] - lo[1]) * scale
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
        return (f'  <polyline class="{label}" points="{coords}" fill="none" '
                f'stroke="{color}" stroke-width="1"/>\n')

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n',
        f"  <title>{escape(title)}</title>\n",
        '  <rect width="100%" height="100%" fill="white"/>\n',
        path(gt, GT_COLOR, "ground-truth"),
        path(cand, CAND_COLOR, "candidate"),
        "</svg>\n",
    ]
    return "".join(parts)
