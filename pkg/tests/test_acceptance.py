"""End-to-end acceptance criteria, one test per criterion.

Each test appends a PASS/FAIL line (with the measured numbers and the
runtime) to the session summary printed at the end of the run.
"""

import math
import time

import numpy as np
import pytest

from gcode_forensics.changepoint import optimal_partition, pelt
from gcode_forensics.dataset import ShapeSpec, VariantSpec, gen_shape, gen_variants, inject_noise
from gcode_forensics.equivalence import compare, layer_dissimilarity, nmse_similarity
from gcode_forensics.gcode_model import extract_skeleton
from gcode_forensics.geometry import (
    convex_hull,
    polygon_area,
    rotate_points,
    signed_distance,
    union_area,
)
from gcode_forensics.manipulator import rotate_gcode
from gcode_forensics.postprocess import PrinterProfile, build_gcode, compute_extrusion

pytestmark = pytest.mark.acceptance

SHAPES = {
    "square": ShapeSpec(kind="polygon_prism", sides=4, num_layers=10, footprint_size=10),
    "star": ShapeSpec(kind="star_prism", num_layers=10, footprint_size=10),
    "L": ShapeSpec(kind="asymmetric_L", num_layers=10, footprint_size=10),
}


@pytest.fixture(scope="module")
def objects():
    return {name: gen_shape(spec, seed=i) for i, (name, spec) in enumerate(SHAPES.items())}


def _record(log, number, ok, detail, seconds):
    log.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail} ({seconds:.1f} s)")


def _variant_scores(objects, variant, with_nmse):
    rows = []
    for name, prog in objects.items():
        for label, cand in gen_variants(prog, VariantSpec(variant)):
            sim = compare(prog, cand).aggregate_similarity_pct
            nm = nmse_similarity(prog, cand) if with_nmse(label) else None
            rows.append((name, label, sim, nm))
    return rows


def test_rotation_invariance(objects, acceptance_log):
    t0 = time.perf_counter()
    rows = _variant_scores(objects, "R", lambda label: 30 <= label["theta"] <= 150)
    elapsed = time.perf_counter() - t0
    sims = np.array([r[2] for r in rows])
    checked = [r for r in rows if r[3] is not None]
    beaten = all(nm < sim for _, _, sim, nm in checked)
    mean_nmse = np.mean([r[3] for r in checked])
    ok = sims.mean() >= 99.5 and beaten and elapsed <= 600 and len(rows) == 108
    _record(acceptance_log, 1, ok,
            f"R mean {sims.mean():.4f}% (sd {sims.std():.3f}), nMSE on 30-150 deg mean {mean_nmse:.2f}%, "
            f"nMSE < checker on all {len(checked)}: {beaten}", elapsed)
    assert len(rows) == 108
    assert sims.mean() >= 99.5
    assert beaten
    assert elapsed <= 600


def test_translation_invariance(objects, acceptance_log):
    t0 = time.perf_counter()
    rows = _variant_scores(objects, "T", lambda label: True)
    elapsed = time.perf_counter() - t0
    sims = np.array([r[2] for r in rows])
    nms = np.array([r[3] for r in rows])
    gap = sims.mean() - nms.mean()
    ok = sims.mean() >= 99.5 and gap >= 20 and elapsed <= 600 and len(rows) == 108
    _record(acceptance_log, 2, ok,
            f"T mean {sims.mean():.4f}%, nMSE mean {nms.mean():.2f}%, gap {gap:.2f} pp", elapsed)
    assert len(rows) == 108
    assert sims.mean() >= 99.5
    assert gap >= 20
    assert elapsed <= 600


def test_combined_invariance(objects, acceptance_log):
    t0 = time.perf_counter()
    rows = _variant_scores(objects, "RT", lambda label: False)
    elapsed = time.perf_counter() - t0
    sims = np.array([r[2] for r in rows])
    ok = sims.mean() >= 99.0 and elapsed <= 45 * 60 and len(rows) == 3 * 288
    _record(acceptance_log, 3, ok,
            f"RT mean {sims.mean():.4f}% (sd {sims.std():.3f}, min {sims.min():.3f}%) over {len(rows)}",
            elapsed)
    assert len(rows) == 3 * 288
    assert sims.mean() >= 99.0
    assert elapsed <= 45 * 60


def test_single_layer_rotation_near_zero(objects, acceptance_log):
    t0 = time.perf_counter()
    worst = 0.0
    for prog in objects.values():
        gt = extract_skeleton(prog)
        rotated = extract_skeleton(rotate_gcode(prog, 15))
        for k, (a, b) in enumerate(zip(gt, rotated)):
            worst = max(worst, layer_dissimilarity(a, b, k).dissimilarity_pct)
    elapsed = time.perf_counter() - t0
    _record(acceptance_log, 4, worst <= 1e-6, f"worst layer dissimilarity at 15 deg {worst:.3e}%", elapsed)
    assert worst <= 1e-6


def _random_series(rng):
    n = int(rng.integers(20, 201))
    steps = int(rng.integers(0, 5))
    # segments of at least 4 samples, remaining length spread at random
    lengths = 4 + rng.multinomial(n - 4 * (steps + 1), np.ones(steps + 1) / (steps + 1))
    cps = np.cumsum(lengths)[:-1].tolist()
    level = 0.3 + 0.3 * np.searchsorted(np.asarray(cps, dtype=int), np.arange(n), side="right")
    return level, cps


def test_pelt_matches_optimal_partition(acceptance_log):
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240601)
    penalty, min_segment = 0.05, 3
    exact_fail, located, noisy = 0, 0, 0
    for i in range(200):
        clean, truth = _random_series(rng)
        sigma = (0.0, 0.03, 0.05)[i % 3]
        series = clean + rng.normal(0, sigma, len(clean)) if sigma else clean
        got = pelt(series, penalty, min_segment)
        if sigma == 0:
            if got != optimal_partition(series, penalty, min_segment) or got != truth:
                exact_fail += 1
        else:
            noisy += 1
            if len(got) == len(truth) and all(abs(a - b) <= 1 for a, b in zip(got, truth)):
                located += 1
    rate = located / noisy
    elapsed = time.perf_counter() - t0
    ok = exact_fail == 0 and rate >= 0.95
    _record(acceptance_log, 5, ok,
            f"sigma=0 mismatches {exact_fail}, noisy within +-1 index {rate:.1%} of {noisy}", elapsed)
    assert exact_fail == 0
    assert rate >= 0.95


def test_extrusion_conservation(acceptance_log):
    t0 = time.perf_counter()
    profile = PrinterProfile()
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        pts = rng.uniform(0, 250, size=(int(rng.integers(2, 60)), 2))
        seg = np.hypot(*np.diff(pts, axis=0).T)
        summed = sum(compute_extrusion(profile, float(s)) for s in seg)
        worst = max(worst, abs(summed - compute_extrusion(profile, float(seg.sum()))))
    e10 = compute_extrusion(profile, 10.0)
    oracle = 0.3 * 1.0 * 0.4 * 10.0 / (math.pi * (1.75 / 2) ** 2)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and abs(e10 - oracle) <= 1e-5
    _record(acceptance_log, 6, ok,
            f"max |sum E - E(total)| {worst:.2e}; E(l=10) {e10:.6f} vs volumetric oracle {oracle:.6f}", elapsed)
    assert worst <= 1e-9
    assert e10 == pytest.approx(oracle, abs=1e-5)


@pytest.fixture(scope="module")
def round_trips(objects):
    out = {}
    for i, (name, prog) in enumerate(objects.items()):
        clean = build_gcode(inject_noise(prog, 0, 0, seed=i))
        noisy = build_gcode(inject_noise(prog, 0.1, 0.03, seed=100 + i))
        out[name] = (prog, clean, noisy)
    return out


def test_postprocess_round_trip(round_trips, acceptance_log):
    t0 = time.perf_counter()
    worst = 0.0
    layers_ok = True
    sims = {}
    for name, (prog, clean, noisy) in round_trips.items():
        src, rec = extract_skeleton(prog), extract_skeleton(clean)
        layers_ok &= len(src) == len(rec)
        for a, b in zip(src, rec):
            layers_ok &= len(a) == len(b)
            if len(a) == len(b):
                worst = max(worst, float(np.abs(np.subtract(a.points, b.points)).max()), abs(a.z - b.z))
        sims[name] = compare(prog, noisy).aggregate_similarity_pct
    elapsed = time.perf_counter() - t0
    ok = layers_ok and worst <= 1e-9 and min(sims.values()) >= 95
    detail = ", ".join(f"{k} {v:.2f}%" for k, v in sims.items())
    _record(acceptance_log, 7, ok, f"sigma=0 max deviation {worst:.1e} mm; noisy similarity {detail}", elapsed)
    assert layers_ok
    assert worst <= 1e-9
    assert min(sims.values()) >= 95


def test_instruction_overhead(round_trips, acceptance_log):
    t0 = time.perf_counter()
    ratios = {name: compare(prog, noisy).instruction_overhead_ratio
              for name, (prog, _, noisy) in round_trips.items()}
    elapsed = time.perf_counter() - t0
    ok = all(0.9 <= r <= 1.1 for r in ratios.values())
    _record(acceptance_log, 8, ok, "overhead " + ", ".join(f"{k} {v:.3f}" for k, v in ratios.items()), elapsed)
    assert ok


def _random_cloud(rng):
    n = int(rng.integers(3, 40))
    scale = 10 ** rng.uniform(-1, 2)
    return rng.uniform(-1, 1, size=(n, 2)) * scale + rng.uniform(-50, 50, size=2)


def test_geometry_properties(acceptance_log):
    t0 = time.perf_counter()
    rng = np.random.default_rng(99)
    failures = {"idempotence": 0, "containment": 0, "union_bounds": 0, "rotation_area": 0}
    for _ in range(1000):
        pts = _random_cloud(rng)
        hull = convex_hull(pts)
        if convex_hull(hull.vertices).vertices != hull.vertices:
            failures["idempotence"] += 1

        pts = _random_cloud(rng)
        hull = convex_hull(pts)
        scale = max(float(np.ptp(pts, axis=0).max()), 1.0)
        if hull.degenerate or any(signed_distance(hull, p) < -1e-9 * scale for p in pts):
            failures["containment"] += int(not hull.degenerate)

        a, b = convex_hull(_random_cloud(rng)), convex_hull(_random_cloud(rng))
        u, aa, ab = union_area(a, b), polygon_area(a), polygon_area(b)
        tol = 1e-9 * max(aa + ab, 1.0)
        if not (max(aa, ab) - tol <= u <= aa + ab + tol):
            failures["union_bounds"] += 1

        pts = _random_cloud(rng)
        deg = float(rng.uniform(0, 360))
        before = polygon_area(convex_hull(pts))
        after = polygon_area(convex_hull(rotate_points(pts, rng.uniform(-50, 50, size=2), deg)))
        if abs(before - after) > 1e-9 * max(before, 1.0):
            failures["rotation_area"] += 1
    elapsed = time.perf_counter() - t0
    ok = not any(failures.values())
    _record(acceptance_log, 9, ok,
            "1000 cases each, failures " + ", ".join(f"{k}={v}" for k, v in failures.items()), elapsed)
    assert failures == {k: 0 for k in failures}
