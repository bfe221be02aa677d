import numpy as np
import pytest
from scipy import stats

from chanest.interference import (ImpulseConfig, NoiseConfig, dbm_to_watt,
                                  sample_awgn, sample_impulsive)


class TestDbmToWatt:
    def test_reference_points(self):
        assert dbm_to_watt(30.0) == pytest.approx(1.0)
        assert dbm_to_watt(0.0) == pytest.approx(1e-3)

    def test_thermal_noise_floor(self):
        # -174 dBm/Hz over 100 MHz is -94 dBm
        assert dbm_to_watt(-94.0) == pytest.approx(3.981e-13, rel=1e-3)
        cfg = NoiseConfig(psd_dbm_per_hz=-174.0, bandwidth_hz=1e8)
        assert cfg.variance_watt == pytest.approx(dbm_to_watt(-94.0), rel=1e-12)


class TestAwgn:
    def test_rejects_nonpositive_variance(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            sample_awgn(rng, 2, 2, 0.0)

    def test_empirical_power(self):
        rng = np.random.default_rng(42)
        n = sample_awgn(rng, 1000, 100, 2.0)
        power = np.mean(np.abs(n) ** 2)
        assert 1.97 <= power <= 2.03

    def test_deterministic_under_fixed_seed(self):
        a = sample_awgn(np.random.default_rng(7), 4, 5, 1.0)
        b = sample_awgn(np.random.default_rng(7), 4, 5, 1.0)
        np.testing.assert_array_equal(a, b)


class TestImpulsive:
    def test_zero_probability_gives_zero_matrix(self):
        cfg = ImpulseConfig(0.0, 1e5, 1.0)
        e = sample_impulsive(np.random.default_rng(0), 10, 10, cfg)
        assert np.all(e == 0)

    def test_dense_limit_power(self):
        cfg = ImpulseConfig(1.0, 1e3, 1.0)
        e = sample_impulsive(np.random.default_rng(1), 1000, 100, cfg)
        assert np.all(e != 0)
        power = np.mean(np.abs(e) ** 2)
        assert abs(power - 1e3) / 1e3 <= 0.03

    def test_occupancy_fraction(self):
        cfg = ImpulseConfig(0.1, 1e5, 1.0)
        e = sample_impulsive(np.random.default_rng(2), 1000, 100, cfg)
        frac = np.count_nonzero(e) / e.size
        assert 0.097 <= frac <= 0.103

    def test_expected_nonzero_count(self):
        cfg = ImpulseConfig(0.25, 10.0, 1.0)
        counts = [np.count_nonzero(sample_impulsive(np.random.default_rng(s),
                                                    20, 50, cfg))
                  for s in range(200)]
        assert np.mean(counts) == pytest.approx(0.25 * 20 * 50, rel=0.02)

    def test_mixture_distribution_ks(self):
        # e + n per entry is a two-component scale mixture; compare |.|^2
        # against an oracle mixture sampler
        sigma2, eta, c2 = 1.0, 50.0, 0.2
        rng = np.random.default_rng(3)
        cfg = ImpulseConfig(c2, eta, sigma2)
        e = sample_impulsive(rng, 1000, 100, cfg)
        n = sample_awgn(rng, 1000, 100, sigma2)
        observed = np.abs(e + n).ravel() ** 2

        oracle_rng = np.random.default_rng(4)
        variances = np.where(oracle_rng.random(100000) < c2,
                             sigma2 + eta * sigma2, sigma2)
        oracle = variances / 2.0 * (oracle_rng.standard_normal(100000) ** 2
                                    + oracle_rng.standard_normal(100000) ** 2)
        result = stats.ks_2samp(observed, oracle)
        assert result.pvalue > 0.01

    def test_validation(self):
        with pytest.raises(ValueError):
            ImpulseConfig(-0.1, 1e3, 1.0)
        with pytest.raises(ValueError):
            ImpulseConfig(0.1, 0.0, 1.0)
        with pytest.raises(ValueError):
            ImpulseConfig(0.1, 1e3, 0.0)
