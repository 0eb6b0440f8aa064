import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_volume
from oracles import oracle_point_in_polygon
from radbench import dvol
from radbench.volume import (
    EmptyMaskError,
    FixedBinCount,
    FixedBinWidth,
    GeometryError,
    Mask,
    RoiPolygon,
    Series,
    Study,
    StudyMismatchError,
    Volume,
    discretize,
    link_across,
    rasterize,
)

SQUARE = [(0.5, 0.5), (2.5, 0.5), (2.5, 2.5), (0.5, 2.5)]


class TestVolume:
    def test_invariants(self):
        with pytest.raises(GeometryError):
            Volume(np.zeros((2, 2)), (1, 1, 1))
        with pytest.raises(GeometryError):
            Volume(np.zeros((2, 2, 2)), (1, 0, 1))
        bad = np.zeros((2, 2, 2))
        bad[0, 0, 0] = np.nan
        with pytest.raises(GeometryError):
            Volume(bad, (1, 1, 1))

    def test_voxels_read_only(self):
        v = make_volume(np.zeros((2, 2, 2)))
        with pytest.raises(ValueError):
            v.voxels[0, 0, 0] = 1


class TestDvolRoundTrip:
    def test_identity_round_trip(self, tmp_path, rng):
        values = rng.normal(size=(4, 4, 4)).astype(np.float32).astype(np.float64)
        vol = Volume(values, (1.0, 1.25, 2.0), (5.0, -3.0, 0.5), "MR")
        path = tmp_path / "v.dvol"
        dvol.write_volume(vol, path)
        loaded = dvol.load_volume(path)
        assert np.array_equal(loaded.voxels, vol.voxels)
        assert loaded.spacing == vol.spacing
        assert loaded.origin == vol.origin
        assert loaded.modality == "MR"

    def test_int16_round_trip(self, tmp_path):
        vol = make_volume(np.arange(8).reshape(2, 2, 2))
        path = tmp_path / "v.dvol"
        dvol.write_volume(vol, path)
        assert b"int16" in path.read_bytes()[:200]
        assert np.array_equal(dvol.load_volume(path).voxels, vol.voxels)

    def test_write_load_write_bit_identical(self, tmp_path, rng):
        vol = Volume(rng.normal(size=(3, 4, 5)).astype(np.float32).astype(np.float64),
                     (0.7, 0.7, 3.0))
        p1, p2 = tmp_path / "a.dvol", tmp_path / "b.dvol"
        dvol.write_volume(vol, p1)
        dvol.write_volume(dvol.load_volume(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_size_mismatch(self, tmp_path):
        path = tmp_path / "bad.dvol"
        header = b"DVOL 1\ndims 2 2 2\nspacing 1 1 1\norigin 0 0 0\nmodality CT\ndtype float32\nEND\n"
        path.write_bytes(header + b"\x00" * (7 * 4))  # 7 values, header says 8
        with pytest.raises(dvol.FormatError, match="28 bytes"):
            dvol.load_volume(path)

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "bad.dvol"
        path.write_bytes(b"NOPE\n")
        with pytest.raises(dvol.FormatError):
            dvol.load_volume(path)

    def test_non_finite_payload(self, tmp_path):
        path = tmp_path / "bad.dvol"
        header = b"DVOL 1\ndims 1 1 1\nspacing 1 1 1\norigin 0 0 0\nmodality CT\ndtype float32\nEND\n"
        path.write_bytes(header + np.array([np.inf], dtype="<f4").tobytes())
        with pytest.raises(dvol.FormatError, match="non-finite"):
            dvol.load_volume(path)

    def test_roi_round_trip(self, tmp_path):
        roi = RoiPolygon("r1", "s1", [(0, SQUARE)], {"label": "malignant"}, "g1")
        path = tmp_path / "roi.json"
        dvol.write_roi(roi, path)
        loaded = dvol.load_roi(path)
        assert loaded.slices == roi.slices
        assert loaded.labels == roi.labels
        assert loaded.lesion_group_id == "g1"


class TestRasterize:
    def test_square_four_voxels(self):
        # centers at (1,1), (1,2), (2,1), (2,2) fall inside the square
        vol = make_volume(np.zeros((4, 4, 1)))
        roi = RoiPolygon("r", "s", [(0, SQUARE)])
        mask = rasterize(roi, vol)
        assert mask.voxel_count == 4
        expected = {(1, 1), (2, 1), (1, 2), (2, 2)}
        assert {tuple(p[:2]) for p in np.argwhere(mask.bitmap)} == expected

    def test_matches_scalar_point_in_polygon(self, rng):
        vol = make_volume(np.zeros((12, 12, 1)))
        for _ in range(20):
            pts = rng.uniform(0, 11, size=(5, 2))
            try:
                roi = RoiPolygon("r", "s", [(0, [tuple(p) for p in pts])])
            except GeometryError:
                continue  # random pentagon was self-intersecting
            try:
                mask = rasterize(roi, vol)
            except EmptyMaskError:
                mask = None
            verts = roi.slices[0][1]
            for x in range(12):
                for y in range(12):
                    expected = oracle_point_in_polygon(x, y, verts)
                    got = bool(mask.bitmap[x, y, 0]) if mask else False
                    assert got == expected

    def test_tiny_triangle_empty(self):
        vol = make_volume(np.zeros((4, 4, 1)))
        roi = RoiPolygon("r", "s", [(0, [(0.1, 0.1), (0.3, 0.1), (0.2, 0.3)])])
        with pytest.raises(EmptyMaskError):
            rasterize(roi, vol)

    def test_two_slices_double_count(self):
        vol = make_volume(np.zeros((4, 4, 2)))
        one = rasterize(RoiPolygon("r", "s", [(0, SQUARE)]), vol)
        two = rasterize(RoiPolygon("r", "s", [(0, SQUARE), (1, SQUARE)]), vol)
        assert two.voxel_count == 2 * one.voxel_count

    def test_out_of_range_slice(self):
        vol = make_volume(np.zeros((4, 4, 1)))
        with pytest.raises(GeometryError):
            rasterize(RoiPolygon("r", "s", [(3, SQUARE)]), vol)

    def test_self_intersecting_rejected(self):
        with pytest.raises(GeometryError, match="self-intersecting"):
            RoiPolygon("r", "s", [(0, [(0, 0), (2, 2), (2, 0), (0, 2)])])

    def test_translation_consistency(self, rng):
        vol = make_volume(np.zeros((16, 16, 1)))
        verts = [(3.2, 3.1), (8.7, 2.9), (9.4, 8.8), (2.6, 7.9)]
        base = rasterize(RoiPolygon("r", "s", [(0, verts)]), vol)
        for dx, dy in [(1, 0), (0, 2), (3, 3)]:
            moved = rasterize(
                RoiPolygon("r", "s", [(0, [(x + dx, y + dy) for x, y in verts])]), vol)
            assert np.array_equal(moved.bitmap, np.roll(base.bitmap, (dx, dy), (0, 1)))


class TestDiscretize:
    def _mask_all(self, shape):
        return Mask(np.ones(shape, dtype=bool))

    def test_fixed_bin_count_clamp(self):
        vals = np.arange(11, dtype=float).reshape(11, 1, 1)
        vol = make_volume(vals)
        disc = discretize(vol, self._mask_all((11, 1, 1)), FixedBinCount(2))
        # level = 1 + floor(2*(x-0)/10): x<5 -> 1, else 2 (x=10 clamped)
        expected = np.where(vals < 5, 1, 2).astype(np.int32)
        assert np.array_equal(disc.levels, expected)
        assert disc.ng == 2

    def test_constant_region(self):
        vol = make_volume(np.full((3, 3, 3), 9.0))
        disc = discretize(vol, self._mask_all((3, 3, 3)), FixedBinCount(32))
        assert disc.ng == 1
        assert np.all(disc.levels == 1)

    def test_fixed_bin_width(self):
        vol = make_volume(np.array([0.0, 30.0, 60.0]).reshape(3, 1, 1))
        disc = discretize(vol, self._mask_all((3, 1, 1)), FixedBinWidth(25.0))
        assert disc.levels.ravel().tolist() == [1, 2, 3]
        assert disc.ng == 3

    def test_invalid_schemes(self):
        with pytest.raises(ValueError):
            FixedBinWidth(0.0)
        with pytest.raises(ValueError):
            FixedBinCount(0)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=40),
           st.integers(1, 16))
    def test_monotone_and_range(self, values, ng):
        arr = np.asarray(values, dtype=np.float64).reshape(-1, 1, 1)
        vol = make_volume(arr)
        disc = discretize(vol, self._mask_all(arr.shape), FixedBinCount(ng))
        levels = disc.levels.ravel()
        order = np.argsort(arr.ravel(), kind="stable")
        assert np.all(np.diff(levels[order]) >= 0)  # x <= y implies level(x) <= level(y)
        assert levels.min() >= 1 and levels.max() <= disc.ng
        assert levels[np.argmax(arr.ravel())] == disc.ng  # max attains Ng

    def test_empty_mask_error(self):
        vol = make_volume(np.zeros((2, 2, 2)))
        with pytest.raises(EmptyMaskError):
            discretize(vol, Mask(np.zeros((2, 2, 2), dtype=bool)), FixedBinCount(4))


class TestLinking:
    def _study(self):
        vol = make_volume(np.zeros((4, 4, 2)))
        study = Study("st1")
        study.add_series(Series("cc", vol))
        study.add_series(Series("mlo", vol))
        study.add_roi(RoiPolygon("r1", "cc", [(0, SQUARE)], {"birads": 4}))
        study.add_roi(RoiPolygon("r2", "mlo", [(1, SQUARE)]))
        return study

    def test_label_propagates(self):
        study = self._study()
        study.link_rois(["r1", "r2"], "lesion-1")
        study.set_label("r1", "label", "malignant")
        assert study.rois["r2"].labels["label"] == "malignant"
        assert study.rois["r2"].labels["birads"] == 4  # merged at link time

    def test_singleton_group(self):
        study = self._study()
        study.link_rois(["r1"], "solo")
        assert study.rois["r1"].lesion_group_id == "solo"

    def test_cross_study_error(self):
        a, b = self._study(), self._study()
        b.study_id = "st2"
        b.rois = {"r3": RoiPolygon("r3", "cc", [(0, SQUARE)])}
        with pytest.raises(StudyMismatchError):
            link_across([a, b], ["r1", "r3"], "g")
