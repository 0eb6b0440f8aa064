"""Volumetric image and annotation data model.

Coordinate conventions: voxel (i, j, k) has its center at integer voxel
coordinates (i, j, k) and physical position origin + (i*sx, j*sy, k*sz).
Arrays are indexed [x, y, z]; serialization is x-fastest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GeometryError(ValueError):
    """Dims/spacing/slice-index violations."""


class EmptyMaskError(ValueError):
    """An ROI rasterized to zero voxels."""


class StudyMismatchError(ValueError):
    """Operation mixing ROIs from different studies."""


@dataclass(frozen=True, eq=False)
class Volume:
    voxels: np.ndarray  # (nx, ny, nz) float64
    spacing: tuple[float, float, float]
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)
    modality: str = ""

    def __post_init__(self):
        v = np.asarray(self.voxels, dtype=np.float64)
        if v.ndim != 3 or min(v.shape) < 1:
            raise GeometryError(f"volume must be 3-D with positive dims, got shape {v.shape}")
        if any(s <= 0 for s in self.spacing):
            raise GeometryError(f"spacing must be positive, got {self.spacing}")
        if not np.all(np.isfinite(v)):
            raise GeometryError("volume contains non-finite values")
        v.flags.writeable = False
        object.__setattr__(self, "voxels", v)
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))
        object.__setattr__(self, "origin", tuple(float(s) for s in self.origin))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.voxels.shape  # type: ignore[return-value]

    def with_voxels(self, voxels: np.ndarray) -> "Volume":
        """Same geometry, new values (used by the image filters)."""
        return Volume(voxels, self.spacing, self.origin, self.modality)


@dataclass
class RoiPolygon:
    roi_id: str
    series_id: str
    # list of (z_index, [(x, y), ...]) in voxel coordinates; a z may repeat,
    # polygons on the same slice combine by the even-odd rule
    slices: list[tuple[int, list[tuple[float, float]]]]
    labels: dict[str, object] = field(default_factory=dict)
    lesion_group_id: str | None = None

    def __post_init__(self):
        if not self.slices:
            raise GeometryError("ROI needs at least one slice polygon")
        norm = []
        for z, verts in self.slices:
            verts = [(float(x), float(y)) for x, y in verts]
            if len(verts) < 3:
                raise GeometryError(f"slice {z}: polygon needs >= 3 vertices")
            if not _is_simple_polygon(verts):
                raise GeometryError(f"slice {z}: polygon is self-intersecting")
            norm.append((int(z), verts))
        self.slices = norm

    @property
    def z_indices(self) -> list[int]:
        return sorted({z for z, _ in self.slices})


@dataclass(frozen=True, eq=False)
class Mask:
    bitmap: np.ndarray  # (nx, ny, nz) bool

    def __post_init__(self):
        b = np.asarray(self.bitmap, dtype=bool)
        if b.ndim != 3:
            raise GeometryError("mask must be 3-D")
        b.flags.writeable = False
        object.__setattr__(self, "bitmap", b)

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.bitmap.shape  # type: ignore[return-value]

    @property
    def voxel_count(self) -> int:
        return int(self.bitmap.sum())


def _segments_properly_cross(p1, p2, q1, q2) -> bool:
    """True if the two open segments cross at an interior point."""

    def orient(a, b, c):
        d = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if d == 0 else (1 if d > 0 else -1)

    o1 = orient(p1, p2, q1)
    o2 = orient(p1, p2, q2)
    o3 = orient(q1, q2, p1)
    o4 = orient(q1, q2, p2)
    return o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4)


def _is_simple_polygon(verts) -> bool:
    n = len(verts)
    for i in range(n):
        a1, a2 = verts[i], verts[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue  # adjacent edges share an endpoint legitimately
            b1, b2 = verts[j], verts[(j + 1) % n]
            if _segments_properly_cross(a1, a2, b1, b2):
                return False
    return True


def _even_odd_inside(verts, nx: int, ny: int) -> np.ndarray:
    """Even-odd point-in-polygon over all voxel centers of one slice."""
    px = np.arange(nx, dtype=np.float64)[:, None]
    py = np.arange(ny, dtype=np.float64)[None, :]
    inside = np.zeros((nx, ny), dtype=bool)
    n = len(verts)
    for i in range(n):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % n]
        if y1 == y2:
            continue  # horizontal edges never cross the test ray
        cond = (y1 > py) != (y2 > py)
        xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
        inside ^= cond & (px < xint)
    return inside


def rasterize(roi: RoiPolygon, vol: Volume) -> Mask:
    """Voxel is in-mask iff its center is inside the slice polygon (even-odd).

    Several polygons on the same slice combine by the even-odd rule (XOR),
    so traced contours with holes re-rasterize exactly.
    """
    nx, ny, nz = vol.dims
    bitmap = np.zeros(vol.dims, dtype=bool)
    for z, verts in roi.slices:
        if not (0 <= z < nz):
            raise GeometryError(f"slice index {z} outside volume (nz={nz})")
        bitmap[:, :, z] ^= _even_odd_inside(verts, nx, ny)
    if not bitmap.any():
        raise EmptyMaskError(f"ROI {roi.roi_id} rasterizes to an empty mask")
    return Mask(bitmap)


@dataclass(frozen=True)
class FixedBinCount:
    ng: int = 32

    def __post_init__(self):
        if self.ng < 1:
            raise ValueError(f"bin count must be >= 1, got {self.ng}")


@dataclass(frozen=True)
class FixedBinWidth:
    width: float = 25.0

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError(f"bin width must be > 0, got {self.width}")


BinScheme = FixedBinCount | FixedBinWidth


@dataclass(frozen=True, eq=False)
class DiscretizedVolume:
    levels: np.ndarray  # int32, 1..ng inside mask, 0 outside
    ng: int
    bin_edges: np.ndarray
    scheme: BinScheme

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=np.int32)
        lv.flags.writeable = False
        object.__setattr__(self, "levels", lv)


def discretize(vol: Volume, mask: Mask, scheme: BinScheme = FixedBinCount()) -> DiscretizedVolume:
    """Quantize in-mask intensities to gray levels 1..Ng.

    Fixed bin count: level = 1 + floor(Ng*(x-min)/(max-min)), max clamped to
    Ng; a constant region degenerates to Ng = 1.  Fixed bin width W:
    level = 1 + floor((x-min)/W).
    """
    if mask.dims != vol.dims:
        raise GeometryError(f"mask dims {mask.dims} != volume dims {vol.dims}")
    inm = mask.bitmap
    if not inm.any():
        raise EmptyMaskError("cannot discretize an empty mask")
    vals = vol.voxels[inm]
    lo, hi = float(vals.min()), float(vals.max())
    levels = np.zeros(vol.dims, dtype=np.int32)

    if isinstance(scheme, FixedBinCount):
        if hi == lo:
            ng = 1
            levels[inm] = 1
            edges = np.array([lo, lo + 1.0])
        else:
            ng = scheme.ng
            lv = 1 + np.floor(ng * (vals - lo) / (hi - lo)).astype(np.int32)
            levels[inm] = np.minimum(lv, ng)
            edges = lo + (hi - lo) * np.arange(ng + 1) / ng
    else:
        w = scheme.width
        lv = 1 + np.floor((vals - lo) / w).astype(np.int32)
        ng = int(lv.max())
        levels[inm] = lv
        edges = lo + w * np.arange(ng + 1)
    return DiscretizedVolume(levels, ng, np.asarray(edges, dtype=np.float64), scheme)


# --- study / series / ROI hierarchy -----------------------------------------


@dataclass
class Series:
    series_id: str
    volume: Volume
    modality: str = ""


@dataclass
class Study:
    study_id: str
    series: dict[str, Series] = field(default_factory=dict)
    rois: dict[str, RoiPolygon] = field(default_factory=dict)

    def add_series(self, series: Series):
        if series.series_id in self.series:
            raise ValueError(f"duplicate series id {series.series_id!r}")
        self.series[series.series_id] = series

    def add_roi(self, roi: RoiPolygon):
        if roi.series_id not in self.series:
            raise GeometryError(f"ROI references unknown series {roi.series_id!r}")
        self.rois[roi.roi_id] = roi

    def group_members(self, group_id: str) -> list[RoiPolygon]:
        return [r for r in self.rois.values() if r.lesion_group_id == group_id]

    def link_rois(self, roi_ids: list[str], group_id: str) -> None:
        """Put ROIs in one lesion group; labels are unified (first listed wins
        on conflict) and stay shared from then on."""
        missing = [r for r in roi_ids if r not in self.rois]
        if missing:
            raise StudyMismatchError(f"ROIs not in study {self.study_id!r}: {missing}")
        merged: dict[str, object] = {}
        for rid in roi_ids:
            for k, v in self.rois[rid].labels.items():
                merged.setdefault(k, v)
        for rid in roi_ids:
            roi = self.rois[rid]
            roi.lesion_group_id = group_id
            roi.labels = dict(merged)

    def set_label(self, roi_id: str, name: str, value) -> None:
        """Write a label; propagates to every ROI sharing the lesion group."""
        roi = self.rois[roi_id]
        targets = [roi]
        if roi.lesion_group_id is not None:
            targets = self.group_members(roi.lesion_group_id)
        for r in targets:
            r.labels[name] = value


def link_across(studies: list[Study], roi_ids: list[str], group_id: str) -> Study:
    """Link ROIs that must all live in one study; error if they span studies."""
    owners = {}
    for rid in roi_ids:
        for st in studies:
            if rid in st.rois:
                owners[rid] = st.study_id
    if len(owners) < len(roi_ids):
        unknown = [r for r in roi_ids if r not in owners]
        raise StudyMismatchError(f"unknown ROIs: {unknown}")
    if len(set(owners.values())) > 1:
        raise StudyMismatchError(f"ROIs span multiple studies: {owners}")
    study = next(st for st in studies if st.study_id == owners[roi_ids[0]])
    study.link_rois(roi_ids, group_id)
    return study
