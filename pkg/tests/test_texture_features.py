import numpy as np
import pytest

import oracles
from conftest import random_discretized
from radbench.features import names
from radbench.features.matrices import (
    DIRECTIONS_13,
    glcm_matrices,
    gldm_matrix,
    glrlm_matrices,
    glszm_matrix,
    ngtdm_table,
)
from radbench.features.texture import (
    glcm_features,
    glcm_features_one_direction,
    gldm_features,
    glrlm_features,
    glrlm_features_one_direction,
    glszm_features,
    ngtdm_features,
)


def constant_cube(n=2):
    levels = np.ones((n, n, n), dtype=np.int32)
    mask = np.ones((n, n, n), dtype=bool)
    return levels, mask


class TestGlcmFeatures:
    def test_constant_region(self):
        levels, mask = constant_cube(2)
        counts, _ = glcm_matrices(levels, mask, 1)
        feats, _ = glcm_features(counts, 1)
        assert feats["MaximumProbability"] == 1.0
        assert feats["JointEntropy"] == 0.0
        assert feats["JointEnergy"] == 1.0
        assert feats["Contrast"] == 0.0
        assert feats["MCC"] == 1.0

    def test_checkerboard_contrast_correlation(self):
        levels = (np.indices((4, 4)).sum(axis=0) % 2 + 1).astype(np.int32)[:, :, None]
        mask = np.ones(levels.shape, dtype=bool)
        counts, _ = glcm_matrices(levels, mask, 2)
        d_idx = DIRECTIONS_13.index((1, 0, 0))
        w = set()
        feats = glcm_features_one_direction(counts[d_idx], 2, w)
        assert feats["Contrast"] == pytest.approx(1.0)
        assert feats["Correlation"] == pytest.approx(-1.0)

    def test_single_voxel_degenerate(self):
        levels = np.ones((1, 1, 1), dtype=np.int32)
        mask = np.ones((1, 1, 1), dtype=bool)
        counts, _ = glcm_matrices(levels, mask, 1)
        feats, warnings = glcm_features(counts, 1)
        assert all(v == 0.0 for v in feats.values())
        assert len(warnings) == 24

    def test_matches_formula_oracle(self, rng):
        for _ in range(10):
            levels, mask, ng = random_discretized(rng, shape=(6, 6, 6), ng=6)
            counts, _ = glcm_matrices(levels, mask, ng)
            for c in counts:
                if c.sum() == 0:
                    continue
                w = set()
                got = glcm_features_one_direction(c, ng, w)
                expected = oracles.oracle_glcm_features(c.astype(float), ng)
                for name in names.GLCM:
                    assert got[name] == pytest.approx(expected[name], rel=1e-9), name


class TestGlrlmFeatures:
    def test_run_percentage(self):
        levels = np.array([1, 1, 2], dtype=np.int32).reshape(-1, 1, 1)
        mask = np.ones(levels.shape, dtype=bool)
        mats = glrlm_matrices(levels, mask, 2)
        d_idx = DIRECTIONS_13.index((1, 0, 0))
        feats = glrlm_features_one_direction(mats[d_idx], 3)
        assert feats["RunPercentage"] == pytest.approx(2 / 3)

    def test_constant_line_emphases(self):
        n = 5
        levels = np.full((n, 1, 1), 2, dtype=np.int32)
        mask = np.ones(levels.shape, dtype=bool)
        mats = glrlm_matrices(levels, mask, 2)
        d_idx = DIRECTIONS_13.index((1, 0, 0))
        feats = glrlm_features_one_direction(mats[d_idx], n)
        assert feats["LongRunEmphasis"] == pytest.approx(n ** 2)
        assert feats["ShortRunEmphasis"] == pytest.approx(1 / n ** 2)

    def test_matches_formula_oracle(self, rng):
        for _ in range(10):
            levels, mask, ng = random_discretized(rng, shape=(6, 6, 6), ng=6)
            n_vox = int(mask.sum())
            for m in glrlm_matrices(levels, mask, ng):
                if m.sum() == 0:
                    continue
                got = glrlm_features_one_direction(m, n_vox)
                expected = oracles.oracle_glrlm_features(m.astype(float), n_vox)
                for name in names.GLRLM:
                    assert got[name] == pytest.approx(expected[name], rel=1e-9), name


class TestGlszmFeatures:
    def test_two_singleton_zones(self):
        levels = np.zeros((5, 1, 1), dtype=np.int32)
        mask = np.zeros((5, 1, 1), dtype=bool)
        levels[0] = levels[4] = 1
        mask[0] = mask[4] = True
        feats, _ = glszm_features(glszm_matrix(levels, mask, 1), 2)
        assert feats["ZonePercentage"] == pytest.approx(1.0)

    def test_constant_region(self):
        levels, mask = constant_cube(3)
        feats, _ = glszm_features(glszm_matrix(levels, mask, 1), 27)
        assert feats["ZonePercentage"] == pytest.approx(1 / 27)
        assert feats["LargeAreaEmphasis"] == pytest.approx(27 ** 2)

    def test_matches_formula_oracle(self, rng):
        for _ in range(10):
            levels, mask, ng = random_discretized(rng, shape=(6, 6, 6), ng=6)
            n_vox = int(mask.sum())
            z = glszm_matrix(levels, mask, ng)
            got, _ = glszm_features(z, n_vox)
            expected = oracles.oracle_glszm_features(z.astype(float), n_vox)
            for name in names.GLSZM:
                assert got[name] == pytest.approx(expected[name], rel=1e-9), name


class TestGldmFeatures:
    def test_constant_cube_sum(self):
        levels, mask = constant_cube(3)
        d = gldm_matrix(levels, mask, 1)
        assert d.sum() == 27
        feats, _ = gldm_features(d)
        assert feats["GrayLevelNonUniformity"] == pytest.approx(27.0)

    def test_single_voxel(self):
        levels = np.ones((1, 1, 1), dtype=np.int32)
        mask = np.ones((1, 1, 1), dtype=bool)
        feats, _ = gldm_features(gldm_matrix(levels, mask, 1))
        assert feats["DependenceEntropy"] == 0.0

    def test_matches_formula_oracle(self, rng):
        for _ in range(10):
            levels, mask, ng = random_discretized(rng, shape=(6, 6, 6), ng=6)
            d = gldm_matrix(levels, mask, ng)
            got, _ = gldm_features(d)
            expected = oracles.oracle_gldm_features(d.astype(float))
            for name in names.GLDM:
                assert got[name] == pytest.approx(expected[name], rel=1e-9), name


class TestNgtdmFeatures:
    def test_constant_region_caps(self):
        levels, mask = constant_cube(3)
        feats, warnings = ngtdm_features(ngtdm_table(levels, mask, 1))
        assert feats["Contrast"] == 0.0
        assert feats["Busyness"] == 0.0
        assert feats["Complexity"] == 0.0
        assert feats["Strength"] == 0.0
        assert feats["Coarseness"] == 1e6
        assert "ngtdm_Coarseness" in warnings

    def test_two_voxel_closed_form(self):
        levels = np.array([1, 2], dtype=np.int32).reshape(-1, 1, 1)
        mask = np.ones(levels.shape, dtype=bool)
        t = ngtdm_table(levels, mask, 2)
        feats, _ = ngtdm_features(t)
        # n=(1,1), p=(.5,.5), s=(1,1): sum(p*s)=1 -> coarseness 1
        assert feats["Coarseness"] == pytest.approx(1.0)
        # contrast = [p1*p2*(1-2)^2 * 2 / (2*1)] * [s_tot/nvp] = 0.25 * 1
        assert feats["Contrast"] == pytest.approx(0.25)
        # busyness denominator |1*.5 - 2*.5|*2 = 1 -> busyness 1
        assert feats["Busyness"] == pytest.approx(1.0)
        # complexity = 2 * |1-2|*(p1 s1 + p2 s2)/(p1+p2) / nvp = 2*1*1/1/2 = 1
        assert feats["Complexity"] == pytest.approx(1.0)
        # strength = (p1+p2)*(1-2)^2 * 2 / s_tot = 2/2 = 1
        assert feats["Strength"] == pytest.approx(1.0)

    def test_matches_formula_oracle(self, rng):
        for _ in range(10):
            levels, mask, ng = random_discretized(rng, shape=(6, 6, 6), ng=6)
            t = ngtdm_table(levels, mask, ng)
            got, _ = ngtdm_features(t)
            expected = oracles.oracle_ngtdm_features(t.n, t.p, t.s, t.n_valid)
            for name in names.NGTDM:
                assert got[name] == pytest.approx(expected[name], rel=1e-9), name
