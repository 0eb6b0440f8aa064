"""Texture feature formulas.

Every entropy uses log base 2 with 0*log(0) = 0.  Degenerate statistics
(no valid pairs, zero variance) are emitted as 0.0 with the feature name
recorded in the warnings set instead of aborting; small ROIs must flow
through pipelines.

GLCM and GLRLM features are computed per direction and averaged over the
directions that have at least one pair/run.
"""

from __future__ import annotations

import numpy as np

from . import names
from .matrices import NgtdmTable

NGTDM_COARSENESS_CAP = 1e6


def _plog2(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = np.log2(p[nz])
    return out


def glcm_features_one_direction(counts: np.ndarray, ng: int, warnings: set[str]) -> dict[str, float]:
    p = counts.astype(np.float64) / counts.sum()
    i = np.arange(1, ng + 1, dtype=np.float64)
    ii = i[:, None]
    jj = i[None, :]
    px = p.sum(axis=1)
    py = p.sum(axis=0)
    ux = float((i * px).sum())
    uy = float((i * py).sum())
    sigx = float(np.sqrt(((i - ux) ** 2 * px).sum()))
    sigy = float(np.sqrt(((i - uy) ** 2 * py).sum()))

    # p_{x+y}(k), k = 2..2Ng and p_{x-y}(k), k = 0..Ng-1
    ksum = np.arange(2, 2 * ng + 1, dtype=np.float64)
    p_sum = np.zeros(2 * ng - 1)
    kdiff = np.arange(0, ng, dtype=np.float64)
    p_diff = np.zeros(ng)
    sum_idx = (ii + jj - 2).astype(int)
    diff_idx = np.abs(ii - jj).astype(int)
    np.add.at(p_sum, sum_idx.ravel(), p.ravel())
    np.add.at(p_diff, diff_idx.ravel(), p.ravel())

    autoc = float((ii * jj * p).sum())
    contrast = float(((ii - jj) ** 2 * p).sum())
    if sigx * sigy > 0:
        correlation = (autoc - ux * uy) / (sigx * sigy)
    else:
        correlation = 0.0
        warnings.add("glcm_Correlation")
    cluster = ii + jj - ux - uy
    diff_avg = float((kdiff * p_diff).sum())
    joint_ent = float(-(p * _plog2(p)).sum()) + 0.0

    hx = float(-(px * _plog2(px)).sum())
    hy = float(-(py * _plog2(py)).sum())
    pxpy = px[:, None] * py[None, :]
    lg_pxpy = _plog2(pxpy)
    hxy1 = float(-(p * lg_pxpy).sum())
    hxy2 = float(-(pxpy * lg_pxpy).sum())
    if max(hx, hy) > 0:
        imc1 = (joint_ent - hxy1) / max(hx, hy)
    else:
        imc1 = 0.0
        warnings.add("glcm_Imc1")
    imc2 = float(np.sqrt(max(0.0, 1.0 - np.exp(-2.0 * (hxy2 - joint_ent)))))

    # Markov matrix Q over levels present in p; MCC = |second largest eigenvalue|
    present = px > 0
    if present.sum() <= 1:
        mcc = 1.0
    else:
        psub = p[np.ix_(present, present)]
        px_s = px[present]
        py_s = py[present]
        q = (psub[:, None, :] * psub[None, :, :] / (px_s[:, None, None] * py_s[None, None, :])).sum(axis=2)
        eig = np.linalg.eigvals(q)
        mags = np.sort(np.abs(eig))[::-1]
        mcc = float(mags[1])

    inv_var = float((p_diff[1:] / kdiff[1:] ** 2).sum()) if ng > 1 else 0.0

    return {
        "Autocorrelation": autoc,
        "ClusterProminence": float((cluster ** 4 * p).sum()),
        "ClusterShade": float((cluster ** 3 * p).sum()),
        "ClusterTendency": float((cluster ** 2 * p).sum()),
        "Contrast": contrast,
        "Correlation": float(correlation),
        "DifferenceAverage": diff_avg,
        "DifferenceEntropy": float(-(p_diff * _plog2(p_diff)).sum()) + 0.0,
        "DifferenceVariance": float(((kdiff - diff_avg) ** 2 * p_diff).sum()),
        "Id": float((p / (1.0 + np.abs(ii - jj))).sum()),
        "Idm": float((p / (1.0 + (ii - jj) ** 2)).sum()),
        "Idmn": float((p / (1.0 + ((ii - jj) / ng) ** 2)).sum()),
        "Idn": float((p / (1.0 + np.abs(ii - jj) / ng)).sum()),
        "Imc1": float(imc1),
        "Imc2": imc2,
        "InverseVariance": inv_var,
        "JointAverage": ux,
        "JointEnergy": float((p ** 2).sum()),
        "JointEntropy": joint_ent,
        "MCC": mcc,
        "MaximumProbability": float(p.max()),
        "SumAverage": float((ksum * p_sum).sum()),
        "SumEntropy": float(-(p_sum * _plog2(p_sum)).sum()) + 0.0,
        "SumSquares": float(((i - ux) ** 2 * px).sum()),
    }


def glcm_features(counts_per_dir, ng: int) -> tuple[dict[str, float], set[str]]:
    warnings: set[str] = set()
    per_dir = [glcm_features_one_direction(c, ng, warnings)
               for c in counts_per_dir if c.sum() > 0]
    if not per_dir:
        warnings.update(f"glcm_{n}" for n in names.GLCM)
        return {n: 0.0 for n in names.GLCM}, warnings
    return {n: float(np.mean([f[n] for f in per_dir])) for n in names.GLCM}, warnings


def _weighted_stats(counts: np.ndarray, iv: np.ndarray, jv: np.ndarray, total: float):
    """Marginal variances from the raw count matrix.

    Sums of integer counts are exact, so a distribution concentrated on one
    level yields variance exactly 0 (the constant-region contract)."""
    ci = counts.sum(axis=1)
    cj = counts.sum(axis=0)
    mu_i = (ci * iv).sum() / total
    mu_j = (cj * jv).sum() / total
    var_i = (ci * iv ** 2).sum() / total - mu_i ** 2
    var_j = (cj * jv ** 2).sum() / total - mu_j ** 2
    return mu_i, mu_j, max(var_i, 0.0), max(var_j, 0.0)


def glrlm_features_one_direction(matrix: np.ndarray, n_voxels: int) -> dict[str, float]:
    r = matrix.astype(np.float64)
    nr = r.sum()
    ng, lmax = r.shape
    iv = np.arange(1, ng + 1, dtype=np.float64)
    lv = np.arange(1, lmax + 1, dtype=np.float64)
    p = r / nr
    ri = r.sum(axis=1)
    rl = r.sum(axis=0)
    _, mu_l, var_i, var_l = _weighted_stats(r, iv, lv, nr)
    i2 = iv ** 2
    l2 = lv ** 2
    return {
        "GrayLevelNonUniformity": float((ri ** 2).sum() / nr),
        "GrayLevelNonUniformityNormalized": float((ri ** 2).sum() / nr ** 2),
        "GrayLevelVariance": float(var_i),
        "HighGrayLevelRunEmphasis": float((ri * i2).sum() / nr),
        "LongRunEmphasis": float((rl * l2).sum() / nr),
        "LongRunHighGrayLevelEmphasis": float((r * i2[:, None] * l2[None, :]).sum() / nr),
        "LongRunLowGrayLevelEmphasis": float((r / i2[:, None] * l2[None, :]).sum() / nr),
        "LowGrayLevelRunEmphasis": float((ri / i2).sum() / nr),
        "RunEntropy": float(-(p * _plog2(p)).sum()) + 0.0,
        "RunLengthNonUniformity": float((rl ** 2).sum() / nr),
        "RunLengthNonUniformityNormalized": float((rl ** 2).sum() / nr ** 2),
        "RunPercentage": float(nr / n_voxels),
        "RunVariance": float(var_l),
        "ShortRunEmphasis": float((rl / l2).sum() / nr),
        "ShortRunHighGrayLevelEmphasis": float((r * i2[:, None] / l2[None, :]).sum() / nr),
        "ShortRunLowGrayLevelEmphasis": float((r / i2[:, None] / l2[None, :]).sum() / nr),
    }


def glrlm_features(matrices, n_voxels: int) -> tuple[dict[str, float], set[str]]:
    warnings: set[str] = set()
    per_dir = [glrlm_features_one_direction(m, n_voxels) for m in matrices if m.sum() > 0]
    if not per_dir:
        warnings.update(f"glrlm_{n}" for n in names.GLRLM)
        return {n: 0.0 for n in names.GLRLM}, warnings
    return {n: float(np.mean([f[n] for f in per_dir])) for n in names.GLRLM}, warnings


def glszm_features(matrix: np.ndarray, n_voxels: int) -> tuple[dict[str, float], set[str]]:
    warnings: set[str] = set()
    z = matrix.astype(np.float64)
    nz = z.sum()
    if nz == 0:
        warnings.update(f"glszm_{n}" for n in names.GLSZM)
        return {n: 0.0 for n in names.GLSZM}, warnings
    ng, smax = z.shape
    iv = np.arange(1, ng + 1, dtype=np.float64)
    sv = np.arange(1, smax + 1, dtype=np.float64)
    p = z / nz
    zi = z.sum(axis=1)
    zs = z.sum(axis=0)
    _, _, var_i, var_s = _weighted_stats(z, iv, sv, nz)
    i2 = iv ** 2
    s2 = sv ** 2
    feats = {
        "GrayLevelNonUniformity": float((zi ** 2).sum() / nz),
        "GrayLevelNonUniformityNormalized": float((zi ** 2).sum() / nz ** 2),
        "GrayLevelVariance": float(var_i),
        "HighGrayLevelZoneEmphasis": float((zi * i2).sum() / nz),
        "LargeAreaEmphasis": float((zs * s2).sum() / nz),
        "LargeAreaHighGrayLevelEmphasis": float((z * i2[:, None] * s2[None, :]).sum() / nz),
        "LargeAreaLowGrayLevelEmphasis": float((z / i2[:, None] * s2[None, :]).sum() / nz),
        "LowGrayLevelZoneEmphasis": float((zi / i2).sum() / nz),
        "SizeZoneNonUniformity": float((zs ** 2).sum() / nz),
        "SizeZoneNonUniformityNormalized": float((zs ** 2).sum() / nz ** 2),
        "SmallAreaEmphasis": float((zs / s2).sum() / nz),
        "SmallAreaHighGrayLevelEmphasis": float((z * i2[:, None] / s2[None, :]).sum() / nz),
        "SmallAreaLowGrayLevelEmphasis": float((z / i2[:, None] / s2[None, :]).sum() / nz),
        "ZoneEntropy": float(-(p * _plog2(p)).sum()) + 0.0,
        "ZonePercentage": float(nz / n_voxels),
        "ZoneVariance": float(var_s),
    }
    return feats, warnings


def gldm_features(matrix: np.ndarray) -> tuple[dict[str, float], set[str]]:
    warnings: set[str] = set()
    d = matrix.astype(np.float64)
    n = d.sum()
    if n == 0:
        warnings.update(f"gldm_{x}" for x in names.GLDM)
        return {x: 0.0 for x in names.GLDM}, warnings
    ng, ncol = d.shape
    iv = np.arange(1, ng + 1, dtype=np.float64)
    jv = np.arange(1, ncol + 1, dtype=np.float64)  # dependence k stored at column k+1
    p = d / n
    di = d.sum(axis=1)
    dj = d.sum(axis=0)
    _, _, var_i, var_j = _weighted_stats(d, iv, jv, n)
    i2 = iv ** 2
    j2 = jv ** 2
    feats = {
        "DependenceEntropy": float(-(p * _plog2(p)).sum()) + 0.0,
        "DependenceNonUniformity": float((dj ** 2).sum() / n),
        "DependenceNonUniformityNormalized": float((dj ** 2).sum() / n ** 2),
        "DependenceVariance": float(var_j),
        "GrayLevelNonUniformity": float((di ** 2).sum() / n),
        "GrayLevelVariance": float(var_i),
        "HighGrayLevelEmphasis": float((di * i2).sum() / n),
        "LargeDependenceEmphasis": float((dj * j2).sum() / n),
        "LargeDependenceHighGrayLevelEmphasis": float((d * i2[:, None] * j2[None, :]).sum() / n),
        "LargeDependenceLowGrayLevelEmphasis": float((d / i2[:, None] * j2[None, :]).sum() / n),
        "LowGrayLevelEmphasis": float((di / i2).sum() / n),
        "SmallDependenceEmphasis": float((dj / j2).sum() / n),
        "SmallDependenceHighGrayLevelEmphasis": float((d * i2[:, None] / j2[None, :]).sum() / n),
        "SmallDependenceLowGrayLevelEmphasis": float((d / i2[:, None] / j2[None, :]).sum() / n),
    }
    return feats, warnings


def ngtdm_features(table: NgtdmTable) -> tuple[dict[str, float], set[str]]:
    warnings: set[str] = set()
    if table.n_valid == 0:
        warnings.update(f"ngtdm_{x}" for x in names.NGTDM)
        return {x: 0.0 for x in names.NGTDM}, warnings
    ng = len(table.n)
    iv = np.arange(1, ng + 1, dtype=np.float64)
    p, s = table.p, table.s
    nvp = table.n_valid
    present = p > 0
    ngp = int(present.sum())

    ps = float((p * s).sum())
    coarseness = 1.0 / ps if ps > 0 else NGTDM_COARSENESS_CAP
    if ps == 0:
        warnings.add("ngtdm_Coarseness")
    coarseness = min(coarseness, NGTDM_COARSENESS_CAP)

    ip = iv[present]
    pp = p[present]
    sp_all = float(s.sum())
    if ngp > 1:
        dif2 = (ip[:, None] - ip[None, :]) ** 2
        contrast = float((pp[:, None] * pp[None, :] * dif2).sum()) / (ngp * (ngp - 1)) \
            * (sp_all / nvp)
        busy_den = float(np.abs(ip[:, None] * pp[:, None] - ip[None, :] * pp[None, :]).sum())
        busyness = ps / busy_den if busy_den > 0 else 0.0
        spp = s[present]
        num = np.abs(ip[:, None] - ip[None, :]) * (
            (pp[:, None] * spp[:, None] + pp[None, :] * spp[None, :])
            / (pp[:, None] + pp[None, :])
        )
        complexity = float(num.sum()) / nvp
        strength_num = float(((pp[:, None] + pp[None, :]) * dif2).sum())
        strength = strength_num / sp_all if sp_all > 0 else 0.0
    else:
        contrast = busyness = complexity = strength = 0.0

    return {
        "Busyness": busyness,
        "Coarseness": coarseness,
        "Complexity": complexity,
        "Contrast": contrast,
        "Strength": strength,
    }, warnings
