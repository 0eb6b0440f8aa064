"""Semi-automatic ROI tools: seeded region growing ("Fit Boundary"),
geometric Copy/Paste between series, ROI perturbation, perilesional rings,
and mask -> polygon boundary tracing.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .features.extract import ExtractionSettings, extract_feature_vector
from .volume import EmptyMaskError, GeometryError, Mask, RoiPolygon, Volume, rasterize


class SeedError(ValueError):
    """Region growing could not find any seed voxels."""


@dataclass
class GrowRequest:
    volume: Volume
    curve: RoiPolygon
    polarity: str = "bright"  # or "dark"
    spread_3d: bool = False
    max_voxels: int = 1_000_000
    seed_fraction: float = 0.05  # extreme-intensity fraction used as seeds
    threshold_sigma: float = 1.5  # T = threshold_sigma * in-curve std

    def __post_init__(self):
        if self.polarity not in ("bright", "dark"):
            raise ValueError(f"polarity must be bright|dark, got {self.polarity!r}")
        if self.max_voxels < 1:
            raise ValueError("max_voxels must be >= 1")


@dataclass
class GrowResult:
    mask: Mask
    truncated: bool
    mean: float
    threshold: float


_NEIGHBORS_26 = [
    (dx, dy, dz)
    for dx in (-1, 0, 1)
    for dy in (-1, 0, 1)
    for dz in (-1, 0, 1)
    if (dx, dy, dz) != (0, 0, 0)
]


def fit_boundary(req: GrowRequest, cancelled=None) -> GrowResult:
    """Seeded region growing inside a user-drawn curve.

    Seeds are the brightest (or darkest) ``seed_fraction`` of in-curve
    voxels; the region repeatedly admits the frontier voxel closest to the
    region mean at push time while |x - mean| <= T.  Without spread_3d the
    growth stays on the curve's slices; with it, growth may chain onto
    neighboring slices but only within the curve's 2-D footprint.
    """
    vol = req.volume
    curve_mask = rasterize(req.curve, vol)
    cm = curve_mask.bitmap
    curve_slices = {z for z, _ in req.curve.slices}
    footprint2d = cm.any(axis=2)  # union of the per-slice footprints

    vals = vol.voxels
    in_curve = vals[cm]
    mean0 = float(in_curve.mean())
    t = req.threshold_sigma * float(in_curve.std())

    if req.polarity == "bright":
        cut = np.quantile(in_curve, 1.0 - req.seed_fraction)
        seed_sel = cm & (vals >= cut)
    else:
        cut = np.quantile(in_curve, req.seed_fraction)
        seed_sel = cm & (vals <= cut)
    seeds = np.argwhere(seed_sel)
    if len(seeds) == 0:
        raise SeedError("no seed voxels inside the bounding curve")

    nx, ny, nz = vol.dims

    def admissible(x, y, z):
        if z in curve_slices:
            return cm[x, y, z]
        return req.spread_3d and footprint2d[x, y]

    region = np.zeros(vol.dims, dtype=bool)
    total = 0.0
    count = 0
    heap: list[tuple[float, int, int, int]] = []
    in_heap = np.zeros(vol.dims, dtype=bool)

    def push_neighbors(x, y, z, mean):
        for dx, dy, dz in _NEIGHBORS_26:
            q = (x + dx, y + dy, z + dz)
            if not (0 <= q[0] < nx and 0 <= q[1] < ny and 0 <= q[2] < nz):
                continue
            if region[q] or in_heap[q] or not admissible(*q):
                continue
            in_heap[q] = True
            heapq.heappush(heap, (abs(float(vals[q]) - mean), q[2], q[1], q[0]))

    truncated = False
    for sx, sy, sz in seeds:
        if count >= req.max_voxels:
            truncated = True
            break
        if not region[sx, sy, sz]:
            region[sx, sy, sz] = True
            total += float(vals[sx, sy, sz])
            count += 1
    mean = total / count
    for sx, sy, sz in np.argwhere(region):
        push_neighbors(int(sx), int(sy), int(sz), mean)

    while heap:
        if cancelled is not None and cancelled():
            break
        if count >= req.max_voxels:
            truncated = True
            break
        _, z, y, x = heapq.heappop(heap)
        if region[x, y, z]:
            continue
        if abs(float(vals[x, y, z]) - mean) <= t:
            region[x, y, z] = True
            total += float(vals[x, y, z])
            count += 1
            mean = total / count
            push_neighbors(x, y, z, mean)
    return GrowResult(Mask(region), truncated, mean, t)


# --- Copy/Paste across series -------------------------------------------------


def copy_roi(roi: RoiPolygon, source: Volume, target: Volume, new_roi_id: str,
             target_series_id: str) -> RoiPolygon:
    """Map vertices voxel -> patient coordinates with the source geometry,
    then patient -> voxel with the target's; z snaps to the nearest slice."""
    out_slices = []
    for z, verts in roi.slices:
        pz = source.origin[2] + z * source.spacing[2]
        tz = (pz - target.origin[2]) / target.spacing[2]
        zi = int(round(tz))
        if not (0 <= zi < target.dims[2]):
            raise GeometryError(f"slice {z} maps outside the target volume (z={tz:.2f})")
        mapped = []
        for x, y in verts:
            px = source.origin[0] + x * source.spacing[0]
            py = source.origin[1] + y * source.spacing[1]
            mapped.append(((px - target.origin[0]) / target.spacing[0],
                           (py - target.origin[1]) / target.spacing[1]))
        out_slices.append((zi, mapped))
    return RoiPolygon(new_roi_id, target_series_id, out_slices,
                      labels=dict(roi.labels), lesion_group_id=roi.lesion_group_id)


# --- perturbations -------------------------------------------------------------


@dataclass
class Perturbation:
    kind: str  # dilate | erode | translate | contour-noise
    magnitude: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("dilate", "erode", "translate", "contour-noise"):
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if self.kind in ("dilate", "erode") and self.magnitude < 1:
            raise ValueError("morphological magnitude must be >= 1")


_STRUCT_26 = np.ones((3, 3, 3), dtype=bool)


def perturb_roi(mask: Mask, pert: Perturbation) -> Mask:
    bm = mask.bitmap
    if pert.kind == "dilate":
        out = ndimage.binary_dilation(bm, structure=_STRUCT_26, iterations=int(pert.magnitude))
    elif pert.kind == "erode":
        # border_value=1: out-of-volume neighbors never veto, which keeps
        # erode(dilate(M)) a superset of M even at the volume border
        out = ndimage.binary_erosion(bm, structure=_STRUCT_26,
                                     iterations=int(pert.magnitude), border_value=1)
        if not out.any():
            raise EmptyMaskError("erosion produced an empty mask")
    elif pert.kind == "translate":
        rng = np.random.default_rng(pert.seed)
        m = int(pert.magnitude)
        shift = rng.integers(-m, m + 1, size=3)
        out = np.zeros_like(bm)
        src = [slice(None)] * 3
        dst = [slice(None)] * 3
        for a, s in enumerate(shift):
            n = bm.shape[a]
            if s >= 0:
                src[a], dst[a] = slice(0, n - s), slice(s, n)
            else:
                src[a], dst[a] = slice(-s, n), slice(0, n + s)
        out[tuple(dst)] = bm[tuple(src)]
        if not out.any():
            raise EmptyMaskError("translation moved the mask out of the volume")
    else:  # contour-noise: jitter traced vertices, then re-rasterize
        from .volume import _even_odd_inside

        rng = np.random.default_rng(pert.seed)
        m = pert.magnitude
        out = np.zeros_like(bm)
        traced_any = False
        for z in range(bm.shape[2]):
            for loop in trace_slice_contours(bm[:, :, z]):
                traced_any = True
                jittered = [(x + rng.uniform(-m, m), y + rng.uniform(-m, m))
                            for x, y in loop]
                # jitter may self-intersect; the even-odd rule is still
                # well-defined, so rasterize directly
                out[:, :, z] ^= _even_odd_inside(jittered, bm.shape[0], bm.shape[1])
        if not traced_any:
            raise EmptyMaskError("mask has no contours to perturb")
    return Mask(out)


def robust_features(vol: Volume, roi: RoiPolygon | Mask, n_perturb: int,
                    pert: Perturbation = Perturbation("dilate", 1),
                    settings: ExtractionSettings = ExtractionSettings()):
    """Feature stability across perturbed masks: per-feature mean and
    coefficient of variation over the original plus n_perturb variants."""
    base_mask = rasterize(roi, vol) if isinstance(roi, RoiPolygon) else roi
    vectors = [extract_feature_vector(vol, base_mask, settings)]
    for i in range(n_perturb):
        p = Perturbation(pert.kind, pert.magnitude, pert.seed + i)
        vectors.append(extract_feature_vector(vol, perturb_roi(base_mask, p), settings))
    values = np.stack([fv.values for fv in vectors])
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        cv = np.where(std == 0, 0.0, std / np.where(mean == 0, 1.0, np.abs(mean)))
    return vectors[0].names, mean, cv


def perilesional_ring(mask: Mask, spacing, inner_mm: float, outer_mm: float) -> Mask:
    """Shell around the lesion: dilate(outer) minus dilate(inner), using
    anisotropic Chebyshev dilation with per-axis radius floor(mm/spacing)."""
    if outer_mm <= inner_mm:
        raise ValueError(f"outer ({outer_mm}) must exceed inner ({inner_mm})")

    def chebyshev_dilate(bm, mm):
        radii = [int(np.floor(mm / s + 1e-9)) for s in spacing]
        if all(r == 0 for r in radii):
            return bm
        struct = np.ones(tuple(2 * r + 1 for r in radii), dtype=bool)
        return ndimage.binary_dilation(bm, structure=struct)

    ring = chebyshev_dilate(mask.bitmap, outer_mm) & ~chebyshev_dilate(mask.bitmap, inner_mm)
    if not ring.any():
        raise EmptyMaskError("perilesional ring is empty")
    return Mask(ring)


# --- mask -> polygon boundary tracing ------------------------------------------


def trace_slice_contours(slice2d: np.ndarray) -> list[list[tuple[float, float]]]:
    """Closed contours of a binary slice as voxel-corner polygons.

    Walks the directed crack edges between in and out pixels (the in-region
    stays left of the walk), always taking the sharpest left turn at corner
    junctions, so loops never cross themselves.  Re-rasterizing all loops of
    a slice with the even-odd rule reproduces the bitmap exactly, holes
    included.
    """
    bm = np.asarray(slice2d, dtype=bool)
    if not bm.any():
        return []
    nx, ny = bm.shape

    def inside(x, y):
        return 0 <= x < nx and 0 <= y < ny and bm[x, y]

    # directed edges between corner points (stored at 2x integer coords to
    # stay exact): for pixel (x,y) the corners are (x +/- 0.5, y +/- 0.5)
    edges: dict[tuple[int, int], list[tuple[int, int]]] = {}
    xs, ys = np.nonzero(bm)
    for x, y in zip(xs.tolist(), ys.tolist()):
        c = (2 * x, 2 * y)  # pixel center doubled
        corners = {
            "tl": (c[0] - 1, c[1] - 1), "tr": (c[0] + 1, c[1] - 1),
            "br": (c[0] + 1, c[1] + 1), "bl": (c[0] - 1, c[1] + 1),
        }
        if not inside(x, y - 1):
            edges.setdefault(corners["tl"], []).append(corners["tr"])
        if not inside(x + 1, y):
            edges.setdefault(corners["tr"], []).append(corners["br"])
        if not inside(x, y + 1):
            edges.setdefault(corners["br"], []).append(corners["bl"])
        if not inside(x - 1, y):
            edges.setdefault(corners["bl"], []).append(corners["tl"])

    def turn_preference(din, dout):
        # sharpest left turn first: left > straight > right (back never occurs)
        cross = din[0] * dout[1] - din[1] * dout[0]
        dot = din[0] * dout[0] + din[1] * dout[1]
        if cross < 0:
            return 0  # left turn in (x right, y down) pixel coords
        if dot > 0:
            return 1  # straight
        return 2

    loops = []
    for start in sorted(edges):
        while edges.get(start):
            nxt = edges[start].pop()
            loop = [start]
            prev, cur = start, nxt
            while cur != start:
                loop.append(cur)
                din = (cur[0] - prev[0], cur[1] - prev[1])
                outs = edges.get(cur, [])
                outs.sort(key=lambda d, c=cur, i=din: turn_preference(i, (d[0] - c[0], d[1] - c[1])))
                prev, cur = cur, outs.pop(0)
            # merge collinear runs, convert doubled corner coords back
            simplified = []
            n = len(loop)
            for i in range(n):
                a, b, c = loop[i - 1], loop[i], loop[(i + 1) % n]
                if (b[0] - a[0], b[1] - a[1]) != (c[0] - b[0], c[1] - b[1]):
                    simplified.append((b[0] / 2.0, b[1] / 2.0))
            loops.append(simplified)
    return loops


def mask_to_polygons(mask: Mask, roi_id: str, series_id: str) -> RoiPolygon:
    """Trace every slice of the mask into corner polygons (exact round-trip
    under the even-odd rasterizer)."""
    slices = []
    for z in range(mask.dims[2]):
        for loop in trace_slice_contours(mask.bitmap[:, :, z]):
            slices.append((z, loop))
    if not slices:
        raise EmptyMaskError("empty mask cannot be traced")
    return RoiPolygon(roi_id, series_id, slices)
