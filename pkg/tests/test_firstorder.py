import numpy as np
import pytest

import oracles
from radbench.features import names
from radbench.features.firstorder import firstorder_features


class TestFirstOrder:
    def test_one_to_five(self):
        values = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        levels = np.array([1, 2, 3, 4, 5])
        feats, _ = firstorder_features(values, levels, 5, 1.0)
        assert feats["Mean"] == 3.0
        assert feats["Median"] == 3.0
        assert feats["Range"] == 4.0
        assert feats["Energy"] == 55.0
        assert feats["Variance"] == 2.0
        assert feats["Minimum"] == 1.0
        assert feats["Maximum"] == 5.0

    def test_constant_region(self):
        values = np.full(20, 7.0)
        levels = np.ones(20, dtype=np.int32)
        feats, warnings = firstorder_features(values, levels, 1, 1.0)
        assert feats["Variance"] == 0.0
        assert feats["Entropy"] == 0.0
        assert feats["Uniformity"] == 1.0
        assert feats["Skewness"] == 0.0
        assert feats["Kurtosis"] == 0.0
        assert {"firstorder_Skewness", "firstorder_Kurtosis"} <= warnings

    def test_total_energy_scaling(self):
        values = np.array([2.0, 3.0])
        levels = np.array([1, 2])
        feats, _ = firstorder_features(values, levels, 2, 0.5 * 0.5 * 2.0)
        assert feats["TotalEnergy"] == pytest.approx(0.5 * feats["Energy"])

    def test_matches_direct_oracle(self, rng):
        for _ in range(10):
            n = 100
            values = rng.normal(10, 5, n)
            ng = 16
            lo, hi = values.min(), values.max()
            levels = np.minimum(1 + np.floor(ng * (values - lo) / (hi - lo)), ng).astype(int)
            feats, _ = firstorder_features(values, levels, ng, 2.0)
            expected = oracles.oracle_firstorder(values, levels, ng, 2.0)
            for name in names.FIRSTORDER:
                assert feats[name] == pytest.approx(expected[name], rel=1e-10), name

    def test_permutation_invariance(self, rng):
        values = rng.normal(size=50)
        levels = rng.integers(1, 9, 50)
        a, _ = firstorder_features(values, levels, 8, 1.0)
        perm = rng.permutation(50)
        b, _ = firstorder_features(values[perm], levels[perm], 8, 1.0)
        for name in ("Mean", "Variance", "Energy", "Entropy", "Median"):
            assert a[name] == pytest.approx(b[name], rel=1e-12)
