"""3-D shape descriptors of a binary mask.

Mesh volume and surface area come from the marching-cubes mesh of the
zero-padded mask; axis features from the eigenvalues of the population
covariance of physical voxel-center coordinates; diameters from pairwise
distances between surface-voxel centers (via the convex hull when the
surface is large).
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import names
from .marching import mask_triangles, mesh_surface_area, mesh_volume


def _max_pairwise(points: np.ndarray) -> float:
    """Exact set diameter; hull vertices suffice because the diameter of a
    set equals the diameter of its convex hull."""
    n = len(points)
    if n < 2:
        return 0.0
    if n > 400:
        try:
            points = points[ConvexHull(points).vertices]
        except QhullError:
            pass  # degenerate (flat/collinear) input, brute force below
    d2 = ((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2)
    return float(np.sqrt(d2.max()))


def _surface_voxels(bitmap: np.ndarray) -> np.ndarray:
    """In-mask voxels with at least one face neighbor outside the mask."""
    m = np.pad(bitmap, 1)
    interior = np.ones_like(m)
    for axis in range(3):
        interior &= np.roll(m, 1, axis) & np.roll(m, -1, axis)
    surf = m & ~interior
    return np.argwhere(surf[1:-1, 1:-1, 1:-1])


def shape3d(bitmap: np.ndarray, spacing) -> tuple[dict[str, float], set[str]]:
    warnings: set[str] = set()
    sp = np.asarray(spacing, dtype=np.float64)
    coords = np.argwhere(bitmap).astype(np.float64) * sp[None, :]
    n = len(coords)
    if n == 0:
        raise ValueError("shape features need a non-empty mask")

    voxel_volume = float(n * sp.prod())
    tris = mask_triangles(bitmap, sp)
    mesh_vol = mesh_volume(tris)
    area = mesh_surface_area(tris)
    sphericity = (36.0 * np.pi * mesh_vol ** 2) ** (1.0 / 3.0) / area if area > 0 else 0.0
    sv_ratio = area / mesh_vol if mesh_vol > 0 else 0.0

    centered = coords - coords.mean(axis=0)
    cov = centered.T @ centered / n
    eig = np.sort(np.clip(np.linalg.eigvalsh(cov), 0.0, None))[::-1]  # l1 >= l2 >= l3
    if eig[0] > 0:
        elongation = float(np.sqrt(eig[1] / eig[0]))
        flatness = float(np.sqrt(eig[2] / eig[0]))
    else:
        elongation = flatness = 1.0  # single voxel / degenerate
        warnings.update({"shape_Elongation", "shape_Flatness"})
    major, minor, least = (float(4.0 * np.sqrt(e)) for e in eig)

    surf = _surface_voxels(bitmap).astype(np.float64) * sp[None, :]
    max3d = _max_pairwise(surf)
    # plane families: Slice = fixed z (x-y distances), Column = fixed x,
    # Row = fixed y
    def max2d(fixed_axis: int) -> float:
        keep = [a for a in range(3) if a != fixed_axis]
        best = 0.0
        for value in np.unique(surf[:, fixed_axis]):
            pts = surf[surf[:, fixed_axis] == value][:, keep]
            best = max(best, _max_pairwise(pts))
        return best

    feats = {
        "Elongation": elongation,
        "Flatness": flatness,
        "LeastAxisLength": least,
        "MajorAxisLength": major,
        "Maximum2DDiameterColumn": max2d(0),
        "Maximum2DDiameterRow": max2d(1),
        "Maximum2DDiameterSlice": max2d(2),
        "Maximum3DDiameter": max3d,
        "MeshVolume": mesh_vol,
        "MinorAxisLength": minor,
        "Sphericity": sphericity,
        "SurfaceArea": area,
        "SurfaceVolumeRatio": sv_ratio,
        "VoxelVolume": voxel_volume,
    }
    assert list(feats) == names.SHAPE
    return feats, warnings
