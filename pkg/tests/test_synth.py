import numpy as np
import pytest
from scipy import ndimage

import solidshape as ss
from solidshape.errors import InputError, PipelineError


def _hausdorff(a, b):
    d = np.hypot(*(a[:, None, :] - b[None, :, :]).transpose(2, 0, 1))
    return max(d.min(axis=1).max(), d.min(axis=0).max())


class TestRenderBits:
    def test_deterministic_per_seed(self):
        s = ss.SynthSpec(kind="indented-polygon", seed=5)
        assert np.array_equal(ss.render_bits(s), ss.render_bits(s))
        other = ss.SynthSpec(kind="indented-polygon", seed=6)
        assert not np.array_equal(ss.render_bits(s), ss.render_bits(other))

    def test_unknown_kind_rejected(self):
        with pytest.raises(InputError):
            ss.SynthSpec(kind="blob")

    def test_all_kinds_trace_to_valid_polygons(self):
        for kind in ("disc", "ring", "regular-polygon", "indented-polygon",
                     "stencil-break", "hinge-worm", "horseshoe"):
            poly = ss.trace_boundary(ss.generate(ss.SynthSpec(kind=kind, seed=1)))
            assert poly.area > 0
            assert len(poly) >= 4

    def test_margin_from_borders(self):
        for kind in ("disc", "ring", "horseshoe", "hinge-worm"):
            bits = ss.render_bits(ss.SynthSpec(kind=kind))
            assert not bits[0, :].any() and not bits[-1, :].any()
            assert not bits[:, 0].any() and not bits[:, -1].any()


class TestDiscAndRing:
    def test_shared_hull_area(self):
        disc = ss.trace_boundary(ss.generate(
            ss.SynthSpec(kind="disc", params={"radius": 60.0})))
        ring = ss.trace_boundary(ss.generate(
            ss.SynthSpec(kind="ring", params={"r_out": 60.0, "r_in": 40.0})))
        a_disc = ss.convex_hull(disc.vertices).area
        a_ring = ss.convex_hull(ring.vertices).area
        assert abs(a_disc - a_ring) <= 0.01 * a_disc

    def test_ring_keeps_middle_empty(self):
        mask = ss.generate(ss.SynthSpec(kind="ring", params={"r_out": 60.0, "r_in": 40.0}))
        h, w = mask.bits.shape
        assert not mask.bits[h // 2, w // 2]

    def test_ring_is_simply_connected(self):
        # the slit keeps ingestion from treating the middle as a fillable hole
        mask = ss.generate(ss.SynthSpec(kind="ring"))
        assert mask.hole_count == 0


class TestIndentedPolygon:
    def test_hull_preserved_and_perimeter_grows(self):
        base = {"radius": 90.0, "n_sides": 5, "phase": 0.4}
        plain = ss.trace_boundary(ss.generate(
            ss.SynthSpec(kind="regular-polygon", seed=3, params=base)))
        dented = ss.trace_boundary(ss.generate(ss.SynthSpec(
            kind="indented-polygon", seed=3,
            params={**base, "notches": 5, "depth": 0.5, "width": 0.35})))
        assert dented.perimeter >= 1.3 * plain.perimeter
        h_plain = ss.convex_hull(plain.vertices).vertices
        h_dent = ss.convex_hull(dented.vertices).vertices
        assert _hausdorff(h_plain, h_dent) <= 1.0


class TestHingeWorm:
    def test_straight_hinge_equals_single_stadium(self):
        cfg = {"angle_deg": 180.0, "arm_length": 80.0, "width": 24.0, "orientation": 0.3}
        bits = ss.render_bits(ss.SynthSpec(kind="hinge-worm", params=cfg))
        size = 256
        ys, xs = np.mgrid[0:size, 0:size]
        x, y = xs + 0.5, ys + 0.5
        c = np.array([128.0, 128.0])
        ends = [c + 80.0 * np.array([np.cos(0.3 + s * np.pi / 2),
                                     np.sin(0.3 + s * np.pi / 2)]) for s in (1, -1)]
        d = ends[1] - ends[0]
        t = np.clip(((x - ends[0][0]) * d[0] + (y - ends[0][1]) * d[1]) / (d @ d), 0, 1)
        stadium = (x - (ends[0][0] + t * d[0])) ** 2 + (y - (ends[0][1] + t * d[1])) ** 2 <= 12.0**2
        assert np.array_equal(bits, stadium)


class TestStencilBreak:
    def test_pieces_and_largest_rule(self):
        spec = ss.SynthSpec(kind="stencil-break")
        bits = ss.render_bits(spec)
        _, count = ndimage.label(bits, structure=np.ones((3, 3), dtype=int))
        assert count > 1
        mask = ss.generate(spec)
        assert 0 < mask.area < bits.sum()

    def test_other_kinds_must_stay_connected(self):
        # a ring whose slit is wider than the band disconnects: rejected
        spec = ss.SynthSpec(kind="hinge-worm", params={"width": 0.5})
        with pytest.raises(PipelineError):
            ss.generate(spec)


class TestBenchmarkDataset:
    def test_write_dataset_layout(self, tmp_path):
        entries = ss.benchmark_specs(seed=42, per_class=2)
        manifest = ss.write_dataset(entries, tmp_path / "bench")
        assert len(manifest) == 10
        assert len(manifest.classes) == 5
        assert (tmp_path / "bench" / "manifest.tsv").is_file()
        reloaded = ss.load_manifest(tmp_path / "bench" / "manifest.tsv")
        assert reloaded.ids == manifest.ids
        for p in reloaded.paths:
            assert p.is_file()

    def test_benchmark_shapes_all_describable(self, tmp_path):
        entries = ss.benchmark_specs(seed=1, per_class=1)
        for shape_id, label, spec in entries:
            poly = ss.trace_boundary(ss.generate(spec))
            assert poly.area > 0, shape_id
