"""Photon-level simulator: oracle agreement, determinism, noise statistics."""

import math

import pytest

from pairclicks import (
    DetectionSetup,
    PairDistribution,
    ParameterError,
    PumpMapping,
    SimConfig,
    SimulationError,
    simulate,
    sweep,
)
from pairclicks.click_model import click_probabilities

R = 316000.0


def binomial_sigma(p, n):
    return math.sqrt(p * (1.0 - p) / n)


class TestSimulate:
    def test_opaque_optics_yields_nothing(self):
        setup = DetectionSetup(R, 0.0, 1.0, 1.0)
        result = simulate(SimConfig(50_000, 3, PairDistribution.thermal(5.0), setup))
        assert (result.n_s1, result.n_s2, result.n_coinc) == (0, 0, 0)

    def test_dark_counts_only(self):
        setup = DetectionSetup(R, 1.0, 1.0, 1.0, dark1_hz=0.01 * R, dark2_hz=0.0)
        n = 1_000_000
        result = simulate(SimConfig(n, 11, PairDistribution.thermal(0.0), setup))
        assert result.n_coinc == 0
        assert result.n_s2 == 0
        assert result.n_s1 / n == pytest.approx(0.01, abs=3.0 * binomial_sigma(0.01, n))

    def test_dark_coincidences_scale_as_product(self):
        d1, d2 = 0.02, 0.03
        setup = DetectionSetup(R, 1.0, 1.0, 1.0, dark1_hz=d1 * R, dark2_hz=d2 * R)
        n = 2_000_000
        result = simulate(SimConfig(n, 12, PairDistribution.thermal(0.0), setup))
        assert result.n_s1 / n == pytest.approx(d1, abs=4.0 * binomial_sigma(d1, n))
        assert result.n_s2 / n == pytest.approx(d2, abs=4.0 * binomial_sigma(d2, n))
        assert result.n_coinc / n == pytest.approx(d1 * d2, abs=4.0 * binomial_sigma(d1 * d2, n))

    @pytest.mark.parametrize("kind", ["thermal", "poissonian"])
    @pytest.mark.parametrize("mean", [0.1, 1.0, 10.0])
    @pytest.mark.parametrize("t_eta", [0.02, 0.1])
    def test_matches_analytic_model(self, kind, mean, t_eta):
        dist = PairDistribution(kind, mean)
        setup = DetectionSetup(R, 1.0, t_eta, t_eta)
        n = 1_000_000
        result = simulate(SimConfig(n, 2024, dist, setup))
        probs = click_probabilities(dist, setup)
        assert result.n_s1 / n == pytest.approx(
            probs.p_s1, abs=4.0 * binomial_sigma(probs.p_s1, n)
        )
        assert result.n_s2 / n == pytest.approx(
            probs.p_s2, abs=4.0 * binomial_sigma(probs.p_s2, n)
        )
        assert result.n_coinc / n == pytest.approx(
            probs.p_coinc, abs=4.0 * binomial_sigma(probs.p_coinc, n)
        )

    def test_reproducible_and_worker_independent(self):
        setup = DetectionSetup(R, 0.5, 0.4, 0.6, dark1_hz=100.0, dark2_hz=50.0)
        config = SimConfig(100_000, 77, PairDistribution.thermal(1.3), setup)
        runs = [simulate(config), simulate(config), simulate(config, workers=4)]
        counts = {(r.n_s1, r.n_s2, r.n_coinc) for r in runs}
        assert len(counts) == 1

    def test_different_seeds_differ(self):
        setup = DetectionSetup(R, 0.5, 0.4, 0.6)
        a = simulate(SimConfig(100_000, 1, PairDistribution.thermal(1.0), setup))
        b = simulate(SimConfig(100_000, 2, PairDistribution.thermal(1.0), setup))
        assert (a.n_s1, a.n_s2, a.n_coinc) != (b.n_s1, b.n_s2, b.n_coinc)

    def test_arm_swap_symmetry(self):
        # two-sample proportion test at significance 1e-3 (|z| < 3.29)
        n = 1_000_000
        base = DetectionSetup(R, 0.5, 0.2, 0.6, dark1_hz=100.0, dark2_hz=700.0)
        swapped = DetectionSetup(R, 0.5, 0.6, 0.2, dark1_hz=700.0, dark2_hz=100.0)
        dist = PairDistribution.thermal(1.0)
        res_a = simulate(SimConfig(n, 500, dist, base))
        res_b = simulate(SimConfig(n, 501, dist, swapped))
        for k_a, k_b in ((res_a.n_s1, res_b.n_s2), (res_a.n_s2, res_b.n_s1)):
            pooled = (k_a + k_b) / (2.0 * n)
            z = (k_a / n - k_b / n) / math.sqrt(pooled * (1.0 - pooled) * 2.0 / n)
            assert abs(z) < 3.29

    def test_pair_cap_guard(self):
        setup = DetectionSetup(R, 0.001, 0.1, 0.1)
        config = SimConfig(64, 9, PairDistribution.poissonian(2e6), setup)
        with pytest.raises(SimulationError):
            simulate(config)

    def test_config_validation(self):
        setup = DetectionSetup(R, 1.0, 1.0, 1.0)
        with pytest.raises(ParameterError):
            SimConfig(0, 1, PairDistribution.thermal(1.0), setup)
        with pytest.raises(ParameterError):
            SimConfig(10, -1, PairDistribution.thermal(1.0), setup)
        with pytest.raises(ParameterError):
            SimConfig(10, 2**64, PairDistribution.thermal(1.0), setup)

    def test_rates_properties(self):
        setup = DetectionSetup(R, 0.5, 0.4, 0.6)
        result = simulate(SimConfig(10_000, 4, PairDistribution.thermal(0.5), setup))
        assert result.s1_rate_hz == pytest.approx(result.n_s1 / 10_000 * R)
        raw = result.raw_rates
        assert raw.c_raw_hz <= min(raw.s1_raw_hz, raw.s2_raw_hz)


class TestSweep:
    def test_empty_power_list(self):
        setup = DetectionSetup(R, 1.0, 0.1, 0.1)
        assert sweep([], PumpMapping("thermal", 0.05), setup, 1000, 1) == []

    def test_zero_power_means_vacuum(self):
        setup = DetectionSetup(R, 1.0, 0.1, 0.1)
        [(power, result)] = sweep([0.0], PumpMapping("poissonian", 2.5), setup, 10_000, 1)
        assert power == 0.0
        assert (result.n_s1, result.n_s2, result.n_coinc) == (0, 0, 0)

    def test_means_follow_pump_law_and_match_model(self):
        mapping = PumpMapping("thermal", 0.09)
        setup = DetectionSetup(R, 1.0, 0.1, 0.1)
        n = 200_000
        results = sweep([1.0, 4.0, 9.0], mapping, setup, n, seed=31)
        expected_means = [math.sinh(0.3) ** 2, math.sinh(0.6) ** 2, math.sinh(0.9) ** 2]
        for (power, result), mean in zip(results, expected_means):
            probs = click_probabilities(PairDistribution.thermal(mean), setup)
            assert result.n_s1 / n == pytest.approx(
                probs.p_s1, abs=4.0 * binomial_sigma(probs.p_s1, n)
            )

    def test_point_seeds_are_stable(self):
        mapping = PumpMapping("thermal", 0.05)
        setup = DetectionSetup(R, 1.0, 0.1, 0.1)
        first = sweep([1.0, 2.0], mapping, setup, 50_000, seed=90)
        second = sweep([1.0, 2.0], mapping, setup, 50_000, seed=90, workers=3)
        for (_, a), (_, b) in zip(first, second):
            assert (a.n_s1, a.n_s2, a.n_coinc) == (b.n_s1, b.n_s2, b.n_coinc)
