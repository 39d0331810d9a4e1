"""Acceptance suite: one test per release criterion, each printing a verdict line.

Criterion 11 (the full external 1400-shape benchmark) only runs when
SOLIDSHAPE_MPEG7_MANIFEST points at a dataset manifest; it takes hours.
"""
import os
import time

import numpy as np
import pytest
from scipy import stats

import solidshape as ss
from solidshape.matching import alignment_cost, chi2_matrix
from solidshape.retrieval import RunConfig, describe_dataset, pairwise_costs

from conftest import oracle_cyclic_match_cost, regular_polygon, star_polygon


def _verdict(num, label, ok, elapsed, budget):
    status = "PASS" if ok and elapsed < budget else "FAIL"
    print(f"ACCEPTANCE {num:02d} {status} {label} ({elapsed:.1f}s / budget {budget:.0f}s)")
    assert ok, f"criterion {num}: {label}"
    assert elapsed < budget, f"criterion {num} exceeded {budget}s ({elapsed:.1f}s)"


def _inside_mask(points, verts, tol=1e-9):
    """Vectorized even-odd containment with boundary tolerance (test-local)."""
    vx, vy = verts[:, 0], verts[:, 1]
    nxt = np.roll(verts, -1, axis=0)
    px = points[:, 0][:, None]
    py = points[:, 1][:, None]
    crosses = (vy[None, :] > py) != (nxt[:, 1][None, :] > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = vx[None, :] + (py - vy[None, :]) * (nxt[:, 0] - vx)[None, :] / (nxt[:, 1] - vy)[None, :]
    inside = ((crosses & (px < xint)).sum(axis=1) % 2).astype(bool)
    out = ~inside
    if out.any():
        pts = points[out]
        a = verts[None, :, :]
        d = (nxt - verts)[None, :, :]
        ap = pts[:, None, :] - a
        denom = (d * d).sum(axis=2)
        t = np.clip((ap * d).sum(axis=2) / np.where(denom == 0, 1, denom), 0, 1)
        proj = a + t[:, :, None] * d
        dist = np.hypot(*(pts[:, None, :] - proj).transpose(2, 0, 1)).min(axis=1)
        inside[np.nonzero(out)[0][dist <= tol]] = True
    return inside


def test_criterion_01_sampling_exactness():
    t0 = time.time()
    rng = np.random.default_rng(101)
    ok = True
    for _ in range(200):
        poly = star_polygon(rng, n_vertices=int(rng.integers(6, 20)))
        samples = ss.resample_uniform(poly, 100)
        mesh = ss.triangulate_interior(samples)
        verts = samples.points
        for n_dp in (1, 7, 100, 2000):
            dense = ss.dense_points(mesh, n_dp, seed=int(rng.integers(0, 2**31)))
            if len(dense) != n_dp:
                ok = False
            if not _inside_mask(dense.points, verts).all():
                ok = False
    _verdict(1, "dense sampling count and containment", ok, time.time() - t0, 30.0)


def test_criterion_02_count_conservation():
    t0 = time.time()
    rng = np.random.default_rng(202)
    ok = True
    for _ in range(10_000):
        k = int(rng.integers(1, 160))
        areas = rng.uniform(0.0, 100.0, k)
        areas[rng.random(k) < 0.15] = 0.0
        if areas.sum() <= 0:
            areas[0] = 1.0
        n_dp = int(rng.integers(1, 10_001))
        if int(ss.allocate_counts(areas, n_dp).counts.sum()) != n_dp:
            ok = False
            break
    _verdict(2, "allocation sums exactly to the budget", ok, time.time() - t0, 5.0)


def test_criterion_03_triangulation_laws():
    t0 = time.time()
    from solidshape.geometry import shoelace_area

    rng = np.random.default_rng(303)
    ok = True
    for _ in range(100):
        poly = star_polygon(rng, n_vertices=int(rng.integers(6, 24)))
        samples = ss.resample_uniform(poly, 100)
        mesh = ss.triangulate_interior(samples)
        if len(mesh) != 98:
            ok = False
        target = abs(shoelace_area(samples.points))
        if abs(mesh.total_area - target) > 1e-9 * target:
            ok = False
    _verdict(3, "98 triangles and exact area conservation", ok, time.time() - t0, 60.0)


def test_criterion_04_uniformity():
    t0 = time.time()
    disc = regular_polygon(512, radius=100.0, center=(128.0, 128.0))
    mesh = ss.triangulate_interior(ss.resample_uniform(disc, 100))
    dense = ss.dense_points(mesh, 100_000, seed=42)
    rel = dense.points - np.array([128.0, 128.0])
    radii = np.hypot(rel[:, 0], rel[:, 1])
    frac = (radii <= 50.0).mean()
    ok = abs(frac - 0.25) <= 0.01
    # 16 equal-area polar cells: 4 sqrt-spaced rings x 4 quadrants
    ring = np.clip(np.searchsorted(100.0 * np.sqrt([0.25, 0.5, 0.75]), radii), 0, 3)
    quad = np.floor(np.mod(np.arctan2(rel[:, 1], rel[:, 0]), 2 * np.pi) / (np.pi / 2)).astype(int)
    counts = np.bincount(ring * 4 + np.clip(quad, 0, 3), minlength=16)
    expected = len(dense) / 16.0
    chi2_stat = ((counts - expected) ** 2 / expected).sum()
    crit = stats.chi2.ppf(0.999, 15)
    ok = ok and chi2_stat < crit
    print(f"  half-radius fraction {frac:.4f}, chi2 {chi2_stat:.1f} vs crit {crit:.1f}")
    _verdict(4, "interior sampling is uniform", ok, time.time() - t0, 10.0)


def test_criterion_05_invariance_suite():
    t0 = time.time()
    rng = np.random.default_rng(505)
    poly = star_polygon(rng)
    base = ss.describe_shape(poly)
    ok = True
    # translation: bit-identical histograms
    for t in ((64.0, -32.0), (37.0, -21.5)):
        moved = ss.describe_shape(ss.Polygon(poly.vertices + np.array(t)))
        ok = ok and np.array_equal(base.histograms, moved.histograms)
    # scale x2 (and /2) with shared draws: bit-identical
    ok = ok and np.array_equal(
        base.histograms, ss.describe_shape(ss.Polygon(poly.vertices * 2.0)).histograms)
    ok = ok and np.array_equal(
        base.histograms, ss.describe_shape(ss.Polygon(poly.vertices * 0.5)).histograms)
    # rotation by 90 degrees with reused draws: < 1e-9 per bin
    samples = ss.resample_uniform(poly, 100)
    mesh = ss.triangulate_interior(samples)
    dense = ss.dense_points(mesh, 2000, seed=42)
    hull = ss.convex_hull(poly.vertices)
    sparse = ss.sparse_points(hull, 300)
    md = ss.mean_distance(sparse, dense)
    h0 = np.stack([ss.ssc_histogram(sparse.points[i], sparse.tangents[i], dense, md)
                   for i in range(300)])

    def rot(a):
        return np.column_stack([-a[:, 1], a[:, 0]])

    dense_r = ss.DensePointSet(points=rot(dense.points), seed=42)
    sp_r, tg_r = rot(sparse.points), rot(sparse.tangents)
    md_r = ss.mean_distance(ss.SparsePointSet(points=sp_r, tangents=tg_r), dense_r)
    h1 = np.stack([ss.ssc_histogram(sp_r[i], tg_r[i], dense_r, md_r)
                   for i in range(300)])
    ok = ok and np.abs(h1 - h0).max() < 1e-9
    _verdict(5, "translation/scale/rotation invariance", ok, time.time() - t0, 60.0)


def test_criterion_06_disc_vs_ring_separation():
    t0 = time.time()
    disc = ss.trace_boundary(ss.generate(
        ss.SynthSpec(kind="disc", params={"radius": 60.0})))
    ring = ss.trace_boundary(ss.generate(
        ss.SynthSpec(kind="ring", params={"r_out": 60.0, "r_in": 40.0})))
    d_disc = ss.describe_shape(disc, seed=42)
    d_ring = ss.describe_shape(ring, seed=42)
    d_disc2 = ss.describe_shape(disc, seed=43)
    params = ss.FusionParams()
    across = ss.ssc_cost(d_disc, d_ring, params)
    within = ss.ssc_cost(d_disc, d_disc2, params)
    ok = across > 3.0 * within
    print(f"  disc-vs-ring {across:.2f} vs disc-vs-disc(reseeded) {within:.2f}")
    _verdict(6, "interior descriptor separates disc from ring", ok, time.time() - t0, 300.0)


def test_criterion_07_indentation_robustness():
    t0 = time.time()
    base = {"radius": 90.0, "n_sides": 5, "phase": 0.4}
    pent = ss.trace_boundary(ss.generate(
        ss.SynthSpec(kind="regular-polygon", seed=0, params=base)))
    disc = ss.trace_boundary(ss.generate(
        ss.SynthSpec(kind="disc", params={"radius": 90.0})))
    d_pent = ss.describe_shape(pent)
    d_disc = ss.describe_shape(disc)
    params = ss.FusionParams()
    to_disc = ss.ssc_cost(d_pent, d_disc, params)
    wins = 0
    for notch_seed in range(10):
        spec = ss.SynthSpec(kind="indented-polygon", seed=notch_seed,
                            params={**base, "notches": 5, "depth": 0.5, "width": 0.35})
        dented = ss.trace_boundary(ss.generate(spec))
        cost = ss.ssc_cost(d_pent, ss.describe_shape(dented), params)
        wins += cost < to_disc
    ok = wins == 10
    print(f"  indented-pentagon wins {wins}/10 against disc (disc cost {to_disc:.2f})")
    _verdict(7, "indentations stay closer than a different shape", ok, time.time() - t0, 600.0)


def test_criterion_08_dp_matches_bruteforce():
    t0 = time.time()
    rng = np.random.default_rng(808)
    ok = True
    for _ in range(500):
        m = int(rng.integers(3, 9))
        n = int(rng.integers(3, 9))
        cost = rng.uniform(0.0, 1.2, (m, n))
        tau = 0.6
        got = alignment_cost(None, None, ss.FusionParams(tau=tau),
                             cost=np.minimum(cost, tau))
        want = oracle_cyclic_match_cost(cost, tau)
        if abs(got - want) > 1e-10:
            ok = False
            break
    _verdict(8, "alignment equals exhaustive optimum", ok, time.time() - t0, 120.0)


def test_criterion_09_inner_distance_sanity():
    t0 = time.time()
    ok = True
    # inner distance == Euclidean on convex shapes, exactly
    for n_sides, n_samples in ((7, 40), (12, 60)):
        poly = regular_polygon(n_sides, radius=45.0)
        samples = ss.resample_uniform(poly, n_samples)
        geod = ss.inner_geodesics(ss.visibility_graph(samples, poly), samples.points)
        diff = samples.points[:, None, :] - samples.points[None, :, :]
        ok = ok and np.array_equal(geod.dist, np.hypot(diff[..., 0], diff[..., 1]))
    # articulation: bent worm matches straight worm better with inner geometry

    def worm(theta):
        mask = ss.generate(ss.SynthSpec(kind="hinge-worm", params={
            "angle_deg": theta, "arm_length": 100.0, "width": 18.0}))
        return ss.trace_boundary(mask)

    bent, straight = worm(120.0), worm(180.0)
    params = ss.FusionParams()
    inner_cost = ss.ssc_cost(ss.describe_idsc(bent), ss.describe_idsc(straight), params)
    euclid_cost = ss.ssc_cost(ss.describe_idsc(bent, inner=False),
                              ss.describe_idsc(straight, inner=False), params)
    ok = ok and inner_cost < euclid_cost
    print(f"  articulated pair: inner {inner_cost:.2f} < euclidean {euclid_cost:.2f}")
    _verdict(9, "inner-distance baseline behaves", ok, time.time() - t0, 300.0)


def test_criterion_10_desk_scale_retrieval(tmp_path):
    t0 = time.time()
    entries = ss.benchmark_specs(seed=42, per_class=20)
    manifest = ss.write_dataset(entries, tmp_path / "bench")
    config = RunConfig()
    params = config.fusion()
    idsc_vals = pairwise_costs(describe_dataset(manifest, "idsc", config), params)
    ssc_vals = pairwise_costs(describe_dataset(manifest, "ssc", config), params)
    fused_vals = np.minimum(idsc_vals, config.alpha * ssc_vals)
    b_idsc = ss.bullseye(ss.CostMatrix(values=idsc_vals, method="idsc"), manifest).overall
    b_fused = ss.bullseye(ss.CostMatrix(values=fused_vals, method="fused"), manifest).overall
    ok = (b_fused >= b_idsc) and (b_fused >= 0.90)
    print(f"  bullseye fused {b_fused:.4f} vs idsc {b_idsc:.4f}")
    _verdict(10, "fused retrieval beats the boundary baseline", ok, time.time() - t0, 1800.0)


@pytest.mark.skipif("SOLIDSHAPE_MPEG7_MANIFEST" not in os.environ,
                    reason="external 1400-shape dataset not provided")
def test_criterion_11_full_mpeg7():
    t0 = time.time()
    manifest = ss.load_manifest(os.environ["SOLIDSHAPE_MPEG7_MANIFEST"])
    config = RunConfig(jobs=int(os.environ.get("SOLIDSHAPE_JOBS", "1")))
    idsc_matrix = ss.build_cost_matrix(manifest, config, method="idsc")
    params = config.fusion()
    ssc_vals = pairwise_costs(describe_dataset(manifest, "ssc", config), params,
                              jobs=config.jobs)
    fused_vals = np.minimum(idsc_matrix.values, config.alpha * ssc_vals)
    b_idsc = ss.bullseye(idsc_matrix, manifest).overall
    fused_matrix = ss.CostMatrix(values=fused_vals, method="fused")
    b_fused = ss.bullseye(fused_matrix, manifest).overall
    top20 = ss.top_k_correct(fused_matrix, manifest, k=20)
    ok = (abs(b_fused - 0.9165) <= 0.025 and b_fused > b_idsc
          and abs(top20 - 0.8378) <= 0.03)
    print(f"  fused bullseye {b_fused:.4f} (idsc {b_idsc:.4f}), top-20 {top20:.4f}")
    _verdict(11, "full external benchmark", ok, time.time() - t0, 86_400.0)


def test_criterion_12_metric_units():
    t0 = time.time()
    per_class, n_classes = 20, 3
    n = per_class * n_classes
    ids = [f"s{i:04d}" for i in range(n)]
    labels = [f"c{i // per_class}" for i in range(n)]
    manifest = ss.DatasetManifest(ids=ids, paths=ids, labels=labels)
    vals = np.full((n, n), 9.0)
    for c in range(n_classes):
        sl = slice(c * per_class, (c + 1) * per_class)
        vals[sl, sl] = 1.0
    np.fill_diagonal(vals, 0.0)
    matrix = ss.CostMatrix(values=vals, method="x")
    ok = ss.bullseye(matrix, manifest).overall == 1.0
    ok = ok and ss.first_wrong_position(matrix, manifest) == 21.0

    rng = np.random.default_rng(1212)
    big_ids = [f"m{i:04d}" for i in range(1400)]
    big_labels = [f"c{i // 20}" for i in range(1400)]
    big_manifest = ss.DatasetManifest(ids=big_ids, paths=big_ids, labels=big_labels)
    scores = []
    for _ in range(20):
        rv = rng.uniform(0.01, 1.0, (1400, 1400))
        scores.append(ss.bullseye(
            ss.CostMatrix(values=rv, method="x"), big_manifest).overall)
    mean_score = float(np.mean(scores))
    ok = ok and abs(mean_score - 0.0286) <= 0.01
    print(f"  random-matrix bullseye {mean_score:.4f} (expect ~0.0286)")
    _verdict(12, "metric unit behaviors", ok, time.time() - t0, 60.0)
