"""Workbench volume format (DVOL) and ROI document I/O.

DVOL is a line-oriented ASCII header followed by the raw little-endian voxel
payload in x-fastest order:

    DVOL 1
    dims 4 4 4
    spacing 1.0 1.0 1.0
    origin 0.0 0.0 0.0
    modality CT
    dtype float32
    END
    <payload bytes>

Value types are int16 or float32.  A separate (out-of-scope) converter turns
DICOM series into DVOL.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .volume import GeometryError, RoiPolygon, Volume


class FormatError(ValueError):
    """Malformed DVOL or ROI document."""


_DTYPES = {"int16": np.dtype("<i2"), "float32": np.dtype("<f4")}


def write_volume(vol: Volume, path: str | Path, dtype: str | None = None) -> None:
    """Write a DVOL file.  dtype=None picks int16 when the values fit,
    float32 otherwise."""
    if dtype is None:
        v = vol.voxels
        integral = np.all(v == np.rint(v)) and v.size > 0
        if integral and v.min() >= -32768 and v.max() <= 32767:
            dtype = "int16"
        else:
            dtype = "float32"
    if dtype not in _DTYPES:
        raise FormatError(f"unsupported dtype {dtype!r}")
    nx, ny, nz = vol.dims
    header = (
        "DVOL 1\n"
        f"dims {nx} {ny} {nz}\n"
        f"spacing {vol.spacing[0]!r} {vol.spacing[1]!r} {vol.spacing[2]!r}\n"
        f"origin {vol.origin[0]!r} {vol.origin[1]!r} {vol.origin[2]!r}\n"
        f"modality {vol.modality}\n"
        f"dtype {dtype}\n"
        "END\n"
    )
    payload = np.asarray(vol.voxels, dtype=_DTYPES[dtype]).ravel(order="F").tobytes()
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(payload)


def load_volume(path: str | Path) -> Volume:
    with open(path, "rb") as fh:
        raw = fh.read()
    nl_end = raw.find(b"END\n")
    if not raw.startswith(b"DVOL 1\n") or nl_end < 0:
        raise FormatError(f"{path}: not a DVOL file")
    header = raw[: nl_end].decode("ascii", errors="replace").splitlines()[1:]
    fields: dict[str, str] = {}
    for line in header:
        if not line.strip():
            continue
        key, _, rest = line.partition(" ")
        fields[key] = rest.strip()
    try:
        dims = tuple(int(t) for t in fields["dims"].split())
        spacing = tuple(float(t) for t in fields["spacing"].split())
        origin = tuple(float(t) for t in fields["origin"].split())
        dtype_name = fields["dtype"]
    except (KeyError, ValueError) as exc:
        raise FormatError(f"{path}: malformed header ({exc})") from exc
    if len(dims) != 3 or len(spacing) != 3 or len(origin) != 3:
        raise FormatError(f"{path}: dims/spacing/origin must have 3 components")
    if dtype_name not in _DTYPES:
        raise FormatError(f"{path}: unknown dtype {dtype_name!r}")
    dt = _DTYPES[dtype_name]
    payload = raw[nl_end + 4 :]
    expected = dims[0] * dims[1] * dims[2] * dt.itemsize
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload is {len(payload)} bytes, header declares {expected}"
        )
    flat = np.frombuffer(payload, dtype=dt).astype(np.float64)
    voxels = flat.reshape(dims, order="F")
    if not np.all(np.isfinite(voxels)):
        raise FormatError(f"{path}: payload contains non-finite values")
    try:
        return Volume(voxels, spacing, origin, fields.get("modality", ""))
    except GeometryError as exc:
        raise FormatError(f"{path}: {exc}") from exc


# --- ROI documents (structured text = JSON) ----------------------------------


def roi_to_doc(roi: RoiPolygon) -> dict:
    return {
        "roi_id": roi.roi_id,
        "series_id": roi.series_id,
        "slices": [[z, [[x, y] for x, y in verts]] for z, verts in roi.slices],
        "labels": dict(roi.labels),
        "lesion_group_id": roi.lesion_group_id,
    }


def roi_from_doc(doc: dict) -> RoiPolygon:
    try:
        return RoiPolygon(
            roi_id=doc["roi_id"],
            series_id=doc["series_id"],
            slices=[(z, [(x, y) for x, y in verts]) for z, verts in doc["slices"]],
            labels=dict(doc.get("labels", {})),
            lesion_group_id=doc.get("lesion_group_id"),
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed ROI document: {exc}") from exc


def write_roi(roi: RoiPolygon, path: str | Path) -> None:
    Path(path).write_text(json.dumps(roi_to_doc(roi), indent=2, sort_keys=True))


def load_roi(path: str | Path) -> RoiPolygon:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    return roi_from_doc(doc)
