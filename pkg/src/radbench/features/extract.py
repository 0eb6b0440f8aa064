"""Feature-vector extraction: shape once per mask, then 93 intensity
features (18 first-order + 24 GLCM + 14 GLDM + 16 GLRLM + 16 GLSZM +
5 NGTDM) per derived image.

Default configuration: 13 derived images x 93 + 14 shape = 1223 columns.
Each enabled LoG sigma appends one more 93-column block (one sigma -> 1316).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from ..filters import derived_images
from ..volume import (
    BinScheme,
    DiscretizedVolume,
    FixedBinCount,
    FixedBinWidth,
    Mask,
    RoiPolygon,
    Volume,
    discretize,
    rasterize,
)
from . import names
from .firstorder import firstorder_features
from .matrices import glcm_matrices, gldm_matrix, glrlm_matrices, glszm_matrix, ngtdm_table
from .shape import shape3d
from .texture import (
    glcm_features,
    gldm_features,
    glrlm_features,
    glszm_features,
    ngtdm_features,
)


@dataclass(frozen=True)
class ExtractionSettings:
    bin_count: int | None = 32
    bin_width: float | None = None  # set to use fixed-bin-width instead
    gldm_alpha: int = 0
    log_sigmas_mm: tuple[float, ...] = ()

    def scheme(self) -> BinScheme:
        if self.bin_width is not None:
            return FixedBinWidth(self.bin_width)
        return FixedBinCount(self.bin_count or 32)

    def settings_hash(self) -> str:
        doc = {
            "bin_count": self.bin_count,
            "bin_width": self.bin_width,
            "gldm_alpha": self.gldm_alpha,
            "log_sigmas_mm": list(self.log_sigmas_mm),
        }
        return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class FeatureVector:
    names: list[str]
    values: np.ndarray
    roi_id: str
    settings_hash: str
    warnings: set[str] = field(default_factory=set)

    def __len__(self) -> int:
        return len(self.names)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values.tolist()))

    def to_doc(self) -> dict:
        return {
            "roi_id": self.roi_id,
            "settings_hash": self.settings_hash,
            "names": self.names,
            "values": [float(v) for v in self.values],
            "warnings": sorted(self.warnings),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "FeatureVector":
        return cls(
            names=list(doc["names"]),
            values=np.asarray(doc["values"], dtype=np.float64),
            roi_id=doc["roi_id"],
            settings_hash=doc["settings_hash"],
            warnings=set(doc.get("warnings", [])),
        )


def _crop_to_bbox(arr: np.ndarray, bitmap: np.ndarray):
    idx = np.argwhere(bitmap)
    lo = idx.min(axis=0)
    hi = idx.max(axis=0) + 1
    window = tuple(slice(a, b) for a, b in zip(lo, hi))
    return arr[window], bitmap[window]


def intensity_features(vol: Volume, mask: Mask, settings: ExtractionSettings):
    """The 93 intensity features of one (derived) image, in column order."""
    disc: DiscretizedVolume = discretize(vol, mask, settings.scheme())
    # texture matrices only relate in-mask voxels, so the bounding box crop
    # is exact and keeps 64^3 ROIs fast
    levels, inm = _crop_to_bbox(disc.levels, mask.bitmap)
    raw, _ = _crop_to_bbox(vol.voxels, mask.bitmap)
    ng = disc.ng
    voxel_volume = float(np.prod(vol.spacing))

    feats: dict[str, float] = {}
    warnings: set[str] = set()

    fo, w = firstorder_features(raw[inm], levels[inm], ng, voxel_volume)
    feats.update({f"firstorder_{k}": v for k, v in fo.items()})
    warnings |= w

    glcm_counts, _ = glcm_matrices(levels, inm, ng)
    f, w = glcm_features(glcm_counts, ng)
    feats.update({f"glcm_{k}": v for k, v in f.items()})
    warnings |= w

    f, w = gldm_features(gldm_matrix(levels, inm, ng, settings.gldm_alpha))
    feats.update({f"gldm_{k}": v for k, v in f.items()})
    warnings |= w

    n_vox = int(inm.sum())
    f, w = glrlm_features(glrlm_matrices(levels, inm, ng), n_vox)
    feats.update({f"glrlm_{k}": v for k, v in f.items()})
    warnings |= w

    f, w = glszm_features(glszm_matrix(levels, inm, ng), n_vox)
    feats.update({f"glszm_{k}": v for k, v in f.items()})
    warnings |= w

    f, w = ngtdm_features(ngtdm_table(levels, inm, ng))
    feats.update({f"ngtdm_{k}": v for k, v in f.items()})
    warnings |= w
    return feats, warnings


def extract_feature_vector(
    vol: Volume,
    roi: RoiPolygon | Mask,
    settings: ExtractionSettings = ExtractionSettings(),
) -> FeatureVector:
    mask = rasterize(roi, vol) if isinstance(roi, RoiPolygon) else roi
    roi_id = roi.roi_id if isinstance(roi, RoiPolygon) else "mask"
    if mask.dims != vol.dims:
        raise ValueError(f"mask dims {mask.dims} != volume dims {vol.dims}")
    if mask.voxel_count == 0:
        raise ValueError("cannot extract features from an empty mask")

    all_names: list[str] = list(names.shape_column_names())
    all_values: list[float] = []
    warnings: set[str] = set()

    sf, w = shape3d(mask.bitmap, vol.spacing)
    all_values.extend(sf[k] for k in names.SHAPE)
    warnings |= {f"original_{x}" for x in w}

    for image_name, image in derived_images(vol, settings.log_sigmas_mm):
        feats, w = intensity_features(image, mask, settings)
        cols = names.intensity_column_names(image_name)
        all_names.extend(cols)
        prefix_len = len(image_name) + 1
        all_values.extend(feats[c[prefix_len:]] for c in cols)
        warnings |= {f"{image_name}_{x}" for x in w}

    values = np.asarray(all_values, dtype=np.float64)
    assert np.all(np.isfinite(values)), "feature vector contains non-finite values"
    return FeatureVector(
        names=all_names,
        values=values,
        roi_id=roi_id,
        settings_hash=settings.settings_hash(),
        warnings=warnings,
    )
