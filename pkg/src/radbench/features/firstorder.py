"""First-order statistics over the in-mask intensity values.

Entropy and Uniformity use the discretized histogram; everything else the
raw values.  Population moments (divide by N); percentiles use linear
interpolation.  Skewness/Kurtosis of a constant region are defined as 0 and
flagged.
"""

from __future__ import annotations

import numpy as np

from . import names


def firstorder_features(values, levels, ng: int, voxel_volume_mm3: float):
    """values: raw in-mask intensities; levels: their gray levels (1..ng)."""
    warnings: set[str] = set()
    v = np.asarray(values, dtype=np.float64)
    n = v.size
    p10, p25, p50, p75, p90 = np.percentile(v, [10, 25, 50, 75, 90])
    constant = float(v.min()) == float(v.max())
    # the mean of n identical floats can round off by an ulp; pin the
    # degenerate case so variance/deviation are exactly 0
    mean = float(v[0]) if constant else float(v.mean())
    var = 0.0 if constant else float(((v - mean) ** 2).mean())
    energy = float((v ** 2).sum())

    hist = np.bincount(np.asarray(levels) - 1, minlength=ng).astype(np.float64)
    p = hist / n
    nz = p > 0
    entropy = float(-(p[nz] * np.log2(p[nz])).sum()) + 0.0
    uniformity = float((p ** 2).sum())

    if var > 0:
        sd = np.sqrt(var)
        skewness = float((((v - mean) / sd) ** 3).mean())
        kurtosis = float((((v - mean) / sd) ** 4).mean())
    else:
        skewness = kurtosis = 0.0
        warnings.update({"firstorder_Skewness", "firstorder_Kurtosis"})

    if constant:
        mad = rmad = 0.0
    else:
        mad = float(np.abs(v - mean).mean())
        robust = v[(v >= p10) & (v <= p90)]
        rmad = float(np.abs(robust - robust.mean()).mean()) if robust.size else 0.0

    feats = {
        "10Percentile": float(p10),
        "90Percentile": float(p90),
        "Energy": energy,
        "Entropy": entropy,
        "InterquartileRange": float(p75 - p25),
        "Kurtosis": kurtosis,
        "Maximum": float(v.max()),
        "Mean": mean,
        "MeanAbsoluteDeviation": mad,
        "Median": float(p50),
        "Minimum": float(v.min()),
        "Range": float(v.max() - v.min()),
        "RobustMeanAbsoluteDeviation": rmad,
        "RootMeanSquared": float(np.sqrt(energy / n)),
        "Skewness": skewness,
        "TotalEnergy": float(voxel_volume_mm3 * energy),
        "Uniformity": uniformity,
        "Variance": var,
    }
    assert list(feats) == names.FIRSTORDER
    return feats, warnings
