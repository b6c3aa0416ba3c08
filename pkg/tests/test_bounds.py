import math

import pytest

from c3t.bounds import (
    awgn_capacity_bits,
    gaussian_q,
    gaussian_q_inverse,
    opta_sdr_bound,
    polyanskiy_block_length,
    quantizer_rate,
    required_source_samples,
)
from c3t.reference import TABLE2, TABLE2_TOLERANCE, TABLE2_TOLERANCE_R_GT_C


class TestOpta:
    def test_zero_snr_limit(self):
        # pi e / 6 = 1.423289..., independent of n
        for n in (1, 4, 100):
            assert opta_sdr_bound(0.0, n) == math.pi * math.e / 6.0
            assert math.isclose(opta_sdr_bound(0.0, n), 1.4233, abs_tol=5e-5)

    def test_n4_at_0db(self):
        assert math.isclose(opta_sdr_bound(1.0, 4), 22.773, abs_tol=2e-3)

    def test_n4_at_5db(self):
        assert math.isclose(opta_sdr_bound(10.0**0.5, 4), 427.1, rel_tol=1e-3)

    def test_monotone_in_snr_and_dimension(self):
        snrs = [0.1 * k for k in range(50)]
        vals = [opta_sdr_bound(s, 4) for s in snrs]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert opta_sdr_bound(1.0, 6) > opta_sdr_bound(1.0, 4)

    def test_negative_snr_rejected(self):
        with pytest.raises(ValueError):
            opta_sdr_bound(-0.1, 4)


class TestQuantizerRate:
    def test_20db(self):
        bits = quantizer_rate(20.0)
        assert math.isclose(bits, 4.322, abs_tol=1e-3)
        assert math.isclose(bits / 6.0, 0.7204, abs_tol=1e-4)

    def test_12db(self):
        bits = quantizer_rate(12.0)
        assert math.isclose(bits, 2.993, abs_tol=1e-3)
        assert math.isclose(bits / 4.0, 0.7483, abs_tol=1e-4)

    def test_one_bit_per_step(self):
        assert math.isclose(quantizer_rate(6.02), 2.0, rel_tol=1e-12)

    def test_requires_positive_sdr(self):
        with pytest.raises(ValueError):
            quantizer_rate(0.0)


class TestGaussianQInverse:
    def test_median(self):
        assert gaussian_q_inverse(0.5) == 0.0

    def test_known_values(self):
        assert math.isclose(gaussian_q_inverse(1e-3), 3.0902, abs_tol=2e-4)
        assert math.isclose(gaussian_q_inverse(1e-6), 4.7534, abs_tol=2e-4)

    def test_roundtrip_accuracy(self):
        for eps in (0.3, 1e-2, 1e-3, 1e-5, 1e-6, 1e-9):
            x = gaussian_q_inverse(eps)
            assert abs(gaussian_q(x) - eps) / eps < 1e-6

    def test_upper_tail_symmetry(self):
        assert math.isclose(
            gaussian_q_inverse(0.9), -gaussian_q_inverse(0.1), rel_tol=1e-9
        )

    def test_domain(self):
        for eps in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                gaussian_q_inverse(eps)


class TestBlockLength:
    def test_n6_operating_point(self):
        # SNR 3 dB, R from a 20 dB SDR over 6 channel uses
        rate = quantizer_rate(20.0) / 6.0
        n_c = polyanskiy_block_length(10.0**0.3, rate, 1e-3)
        assert abs(n_c / 6.0 - 290) / 290 < 0.03
        n_c6 = polyanskiy_block_length(10.0**0.3, rate, 1e-6)
        assert abs(n_c6 / 6.0 - 686) / 686 < 0.03

    def test_n4_rate_above_capacity(self):
        rate = quantizer_rate(12.0) / 4.0
        snr = 10.0**0.05
        assert rate > awgn_capacity_bits(snr)
        n_c = polyanskiy_block_length(snr, rate, 1e-3)
        assert abs(n_c / 4.0 - 45) / 45 < 0.05

    def test_error_rate_scaling_is_exact(self):
        # N_c scales as Qinv(eps)^2 with everything else fixed
        rate = 0.72
        snr = 2.0
        ratio = polyanskiy_block_length(snr, rate, 1e-6) / polyanskiy_block_length(
            snr, rate, 1e-3
        )
        qratio = (gaussian_q_inverse(1e-6) / gaussian_q_inverse(1e-3)) ** 2
        assert math.isclose(ratio, qratio, rel_tol=1e-9)

    def test_rate_equals_capacity(self):
        snr = 3.0
        with pytest.raises(ZeroDivisionError, match="rate equals capacity"):
            polyanskiy_block_length(snr, awgn_capacity_bits(snr), 1e-3)

    def test_epsilon_domain(self):
        with pytest.raises(ValueError):
            polyanskiy_block_length(1.0, 0.5, 0.7)


class TestRequiredSourceSamples:
    def test_all_published_rows_within_tolerance(self):
        for n, snr_db, sdr_db, ns_1e3, ns_1e6 in TABLE2:
            for eps, published in ((1e-3, ns_1e3), (1e-6, ns_1e6)):
                comp = required_source_samples(n, snr_db, sdr_db, eps)
                tol = (
                    TABLE2_TOLERANCE_R_GT_C
                    if comp.rate_exceeds_capacity
                    else TABLE2_TOLERANCE
                )
                rel = abs(comp.source_samples - published) / published
                assert rel <= tol, (n, snr_db, sdr_db, eps, comp.source_samples)

    def test_spot_values(self):
        assert required_source_samples(6, 3.0, 20.0, 1e-3).source_samples == 292
        assert required_source_samples(20, 2.89, 36.0, 1e-6).source_samples == 5
        assert required_source_samples(100, -5.45, 20.0, 1e-6).source_samples == 4
        assert required_source_samples(20, 2.89, 36.0, 1e-3).source_samples == 2

    def test_regime_flag_only_on_n4_rows(self):
        flags = {
            (n, snr): required_source_samples(n, snr, sdr, 1e-3).rate_exceeds_capacity
            for n, snr, sdr, _, _ in TABLE2
        }
        assert flags[(4, 0.5)] and flags[(4, 3.69)]
        assert not any(v for (n, _), v in flags.items() if n != 4)
