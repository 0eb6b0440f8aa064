"""Marching cubes over a binary mask at iso-level 0.5.

The mask is zero-padded so the surface is always closed; with binary values
every edge crossing interpolates to the edge midpoint.  Cells are processed
grouped by cube case, which keeps the whole mesher vectorized.
"""

from __future__ import annotations

import numpy as np

from .mc_tables import CORNER_OFFSETS, EDGE_CORNERS, TRI_TABLE

# midpoint of each edge relative to the cube origin, in voxel units
_EDGE_MIDPOINTS = np.array(
    [
        (np.array(CORNER_OFFSETS[a], dtype=np.float64) + np.array(CORNER_OFFSETS[b])) / 2.0
        for a, b in EDGE_CORNERS
    ]
)

_CORNER_BITS = [(dx, dy, dz) for dx, dy, dz in CORNER_OFFSETS]


def mask_triangles(bitmap: np.ndarray, spacing=(1.0, 1.0, 1.0)) -> np.ndarray:
    """Triangles (n, 3, 3) of the iso-0.5 surface in physical units.

    Vertex coordinates are relative to the padded grid; only differences
    matter for volume/area so the origin is irrelevant.
    """
    m = np.pad(np.asarray(bitmap, dtype=bool), 1)
    # cube case per cell: bit i set when corner i is inside the mask
    nx, ny, nz = m.shape
    case = np.zeros((nx - 1, ny - 1, nz - 1), dtype=np.uint8)
    for bit, (dx, dy, dz) in enumerate(_CORNER_BITS):
        corner = m[dx : nx - 1 + dx, dy : ny - 1 + dy, dz : nz - 1 + dz]
        case |= corner.astype(np.uint8) << bit

    spacing = np.asarray(spacing, dtype=np.float64)
    tris = []
    for c in np.unique(case):
        tri_edges = TRI_TABLE[c]
        if not tri_edges:
            continue
        cells = np.argwhere(case == c).astype(np.float64)  # (k, 3) cube origins
        e = np.array(tri_edges).reshape(-1, 3)  # (t, 3) edge ids per triangle
        # (k, t, 3 verts, 3 coords)
        pts = cells[:, None, None, :] + _EDGE_MIDPOINTS[e][None, :, :, :]
        tris.append(pts.reshape(-1, 3, 3))
    if not tris:
        return np.zeros((0, 3, 3))
    return np.concatenate(tris) * spacing[None, None, :]


def mesh_volume(triangles: np.ndarray) -> float:
    """Enclosed volume from the divergence theorem (signed tetrahedra)."""
    if len(triangles) == 0:
        return 0.0
    a, b, c = triangles[:, 0], triangles[:, 1], triangles[:, 2]
    signed = np.einsum("ij,ij->i", a, np.cross(b, c)) / 6.0
    return float(abs(signed.sum()))


def mesh_surface_area(triangles: np.ndarray) -> float:
    if len(triangles) == 0:
        return 0.0
    v1 = triangles[:, 1] - triangles[:, 0]
    v2 = triangles[:, 2] - triangles[:, 0]
    return float(0.5 * np.linalg.norm(np.cross(v1, v2), axis=1).sum())
