"""Derived-image generation: Haar wavelet bands, Laplacian of Gaussian, and
pointwise intensity transforms.

All outputs keep the source dims/spacing, so masks remain valid on every
derived image.  The default set has 13 entries (original + 8 wavelet bands +
4 intensity transforms); LoG images are opt-in.
"""

from __future__ import annotations

from itertools import product

import numpy as np
from scipy.ndimage import convolve1d

from .volume import GeometryError, Volume

_SQRT2 = np.sqrt(2.0)

WAVELET_BANDS = ["".join(b) for b in product("LH", repeat=3)]  # LLL..HHH, x,y,z letters


def _haar_pair(a: np.ndarray, axis: int) -> tuple[np.ndarray, np.ndarray]:
    # undecimated single-level pair with half-sample symmetric extension:
    # x[n] := x[n-1] past the right edge
    nxt = np.concatenate([np.take(a, range(1, a.shape[axis]), axis=axis),
                          np.take(a, [-1], axis=axis)], axis=axis)
    low = (a + nxt) / _SQRT2
    high = (nxt - a) / _SQRT2
    return low, high


def wavelet_decompose(vol: Volume) -> dict[str, Volume]:
    """Eight undecimated Haar bands, labeled by the filter applied along
    x, y, z in that order (L = smooth, H = detail)."""
    if min(vol.dims) < 2:
        raise GeometryError(f"wavelet needs dims >= 2 along each axis, got {vol.dims}")
    bands = {"": vol.voxels}
    for axis in range(3):
        nxt = {}
        for name, data in bands.items():
            low, high = _haar_pair(data, axis)
            nxt[name + "L"] = low
            nxt[name + "H"] = high
        bands = nxt
    return {name: vol.with_voxels(bands[name]) for name in WAVELET_BANDS}


def log_filter(vol: Volume, sigma_mm: float) -> Volume:
    """Gaussian blur (per-axis sigma in voxels = sigma_mm / spacing, kernel
    truncated at 4*sigma and normalized to sum 1) followed by the 6-neighbor
    Laplacian in physical units (1/mm^2)."""
    if sigma_mm <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma_mm}")
    if sigma_mm < 0.25 * min(vol.spacing):
        raise ValueError(
            f"sigma {sigma_mm} mm below 0.25*min(spacing)={0.25 * min(vol.spacing)}; "
            "kernel degenerates"
        )
    data = vol.voxels
    for axis in range(3):
        sv = sigma_mm / vol.spacing[axis]
        radius = max(1, int(np.ceil(4.0 * sv)))
        t = np.arange(-radius, radius + 1, dtype=np.float64)
        kernel = np.exp(-(t ** 2) / (2.0 * sv * sv))
        kernel /= kernel.sum()
        data = convolve1d(data, kernel, axis=axis, mode="reflect")
    lap = np.zeros_like(data)
    for axis in range(3):
        up = np.concatenate([np.take(data, range(1, data.shape[axis]), axis=axis),
                             np.take(data, [-1], axis=axis)], axis=axis)
        down = np.concatenate([np.take(data, [0], axis=axis),
                               np.take(data, range(0, data.shape[axis] - 1), axis=axis)],
                              axis=axis)
        lap += (up - 2.0 * data + down) / vol.spacing[axis] ** 2
    return vol.with_voxels(lap)


def _rescale(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    vmin, vmax = float(values.min()), float(values.max())
    if vmax == vmin:
        return np.full_like(values, lo)
    return lo + (hi - lo) * (values - vmin) / (vmax - vmin)


def intensity_transforms(vol: Volume) -> dict[str, Volume]:
    """square / squareroot / logarithm / exponential, each rescaled back to
    the input range so downstream discretization stays comparable.  Constant
    input maps to itself for all four."""
    x = vol.voxels
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        return {name: vol.with_voxels(x.copy())
                for name in ("square", "squareroot", "logarithm", "exponential")}
    u = (x - lo) / (hi - lo)
    out = {
        "square": _rescale(u ** 2, lo, hi),
        "squareroot": _rescale(np.sign(x) * np.sqrt(np.abs(x)), lo, hi),
        "logarithm": _rescale(np.log1p(x - lo), lo, hi),
        "exponential": _rescale(np.exp(u), lo, hi),
    }
    return {name: vol.with_voxels(v) for name, v in out.items()}


def format_log_name(sigma_mm: float) -> str:
    return f"log-sigma-{sigma_mm:g}mm"


def derived_images(vol: Volume, log_sigmas_mm: tuple[float, ...] = ()) -> list[tuple[str, Volume]]:
    """The ordered derived-image set feeding feature extraction.

    Default order (13 entries): original, the 8 wavelet bands LLL..HHH,
    square, squareroot, logarithm, exponential; any LoG images append at the
    end.  This order fixes the feature-vector column order.
    """
    entries: list[tuple[str, Volume]] = [("original", vol)]
    bands = wavelet_decompose(vol)
    entries.extend((f"wavelet-{b}", bands[b]) for b in WAVELET_BANDS)
    pointwise = intensity_transforms(vol)
    entries.extend((n, pointwise[n]) for n in ("square", "squareroot", "logarithm", "exponential"))
    for sigma in log_sigmas_mm:
        entries.append((format_log_name(sigma), log_filter(vol, sigma)))
    names = [n for n, _ in entries]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate derived-image names: {names}")
    return entries
