"""Pair-number laws: pmf, generating function, pump mappings, sampling."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from pairclicks import POISSONIAN, THERMAL, PairDistribution, PumpMapping, ParameterError

MEANS = (0.01, 0.1, 1.0, 10.0, 100.0)
QS = (0.0, 0.25, 0.5, 0.9, 0.99, 1.0)


def pgf_even_bruteforce(dist, q):
    """Independent oracle: truncated direct sum of p(m) * q**(2m)."""
    m = np.arange(dist.truncation_index(1e-14) + 1)
    return float(dist.pmf(m) @ (q ** (2.0 * m)))


def block_rng(seed):
    return np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))


class TestPmf:
    def test_thermal_vacuum(self):
        assert PairDistribution.thermal(0.0).pmf(0) == 1.0
        assert PairDistribution.thermal(0.0).pmf(3) == 0.0

    def test_thermal_exact_rational(self):
        # mean 1: p(m) = 1 / 2**(m+1)
        dist = PairDistribution.thermal(1.0)
        assert dist.pmf(2) == pytest.approx(0.125, rel=1e-14)
        assert dist.pmf(0) == pytest.approx(0.5, rel=1e-14)

    def test_poissonian_vacuum_term(self):
        dist = PairDistribution.poissonian(1.0)
        assert dist.pmf(0) == pytest.approx(math.exp(-1.0), rel=1e-14)

    @pytest.mark.parametrize("kind", [THERMAL, POISSONIAN])
    @pytest.mark.parametrize("mean", MEANS)
    def test_normalization_under_truncation(self, kind, mean):
        dist = PairDistribution(kind, mean)
        m = np.arange(dist.truncation_index(1e-14) + 1)
        assert abs(float(dist.pmf(m).sum()) - 1.0) < 1e-12

    @pytest.mark.parametrize("kind", [THERMAL, POISSONIAN])
    @pytest.mark.parametrize("mean", MEANS)
    def test_mean_identity(self, kind, mean):
        dist = PairDistribution(kind, mean)
        m = np.arange(dist.truncation_index(1e-14) + 1)
        assert abs(float(m @ dist.pmf(m)) - mean) < 1e-9

    def test_large_m_does_not_overflow(self):
        dist = PairDistribution.poissonian(100.0)
        value = dist.pmf(100_000)
        assert value == 0.0 or value < 1e-300

    def test_rejects_negative_mean(self):
        with pytest.raises(ParameterError):
            PairDistribution.thermal(-0.5)

    def test_rejects_negative_or_fractional_m(self):
        dist = PairDistribution.thermal(1.0)
        with pytest.raises(ParameterError):
            dist.pmf(-1)
        with pytest.raises(ParameterError):
            dist.pmf(1.5)


class TestPgfEven:
    @pytest.mark.parametrize("kind", [THERMAL, POISSONIAN])
    @pytest.mark.parametrize("mean", MEANS)
    def test_normalization_at_q_one(self, kind, mean):
        assert PairDistribution(kind, mean).pgf_even(1.0) == pytest.approx(1.0, abs=1e-14)

    def test_thermal_value_against_direct_sum(self):
        dist = PairDistribution.thermal(1.0)
        oracle = float(sum(dist.pmf(m) * 0.95 ** (2 * m) for m in range(201)))
        assert dist.pgf_even(0.95) == pytest.approx(oracle, abs=1e-12)
        assert dist.pgf_even(0.95) == pytest.approx(0.9111617312072894, rel=1e-12)

    def test_poissonian_q_zero_is_vacuum_probability(self):
        dist = PairDistribution.poissonian(2.0)
        assert dist.pgf_even(0.0) == pytest.approx(dist.pmf(0), rel=1e-14)
        assert dist.pgf_even(0.0) == pytest.approx(0.1353352832366127, rel=1e-12)

    @pytest.mark.parametrize("kind", [THERMAL, POISSONIAN])
    @pytest.mark.parametrize("mean", MEANS)
    @pytest.mark.parametrize("q", QS)
    def test_closed_form_matches_direct_sum(self, kind, mean, q):
        dist = PairDistribution(kind, mean)
        assert dist.pgf_even(q) == pytest.approx(pgf_even_bruteforce(dist, q), abs=1e-12)

    @given(
        kind=st.sampled_from([THERMAL, POISSONIAN]),
        mean_low=st.floats(0.0, 50.0),
        bump=st.floats(1e-6, 50.0),
        q=st.floats(0.0, 0.999),
    )
    @settings(deadline=None, max_examples=80)
    def test_nonincreasing_in_mean(self, kind, mean_low, bump, q):
        low = PairDistribution(kind, mean_low).pgf_even(q)
        high = PairDistribution(kind, mean_low + bump).pgf_even(q)
        assert high <= low + 1e-12

    @given(
        kind=st.sampled_from([THERMAL, POISSONIAN]),
        mean=st.floats(0.0, 100.0),
        q_low=st.floats(0.0, 1.0),
        q_high=st.floats(0.0, 1.0),
    )
    @settings(deadline=None, max_examples=80)
    def test_nondecreasing_in_q(self, kind, mean, q_low, q_high):
        q_low, q_high = sorted((q_low, q_high))
        dist = PairDistribution(kind, mean)
        assert dist.pgf_even(q_high) >= dist.pgf_even(q_low) - 1e-12

    def test_rejects_q_outside_unit_interval(self):
        dist = PairDistribution.thermal(1.0)
        for q in (-0.1, 1.1, float("nan")):
            with pytest.raises(ParameterError):
                dist.pgf_even(q)


class TestPumpMapping:
    def test_thermal_zero_power(self):
        assert PumpMapping(THERMAL, 0.01).mean_at(0.0) == 0.0

    def test_thermal_against_series_expansion(self):
        # sinh(x)**2 = x**2 + x**4/3 + 2x**6/45 + x**8/315 + ... at x**2 = 0.01 * 1
        mean = PumpMapping(THERMAL, 0.01).mean_at(1.0)
        series = 0.01 + 0.01**2 / 3.0 + 2.0 * 0.01**3 / 45.0 + 0.01**4 / 315.0
        assert mean == pytest.approx(series, rel=1e-11)
        assert mean == pytest.approx(0.010033377809537924, rel=1e-12)

    def test_poissonian_linear(self):
        assert PumpMapping(POISSONIAN, 2.5).mean_at(4.0) == pytest.approx(10.0, rel=1e-15)

    def test_small_pump_linearity_bound(self):
        # for constant*power = 0.01 the relative departure from linearity is < 0.34%
        mapping = PumpMapping(THERMAL, 0.01)
        linear = 0.01
        assert abs(mapping.mean_at(1.0) - linear) / linear < 0.0034

    def test_means_at_matches_scalar(self):
        mapping = PumpMapping(THERMAL, 0.09)
        powers = np.array([1.0, 4.0, 9.0])
        expected = [math.sinh(0.3) ** 2, math.sinh(0.6) ** 2, math.sinh(0.9) ** 2]
        assert np.allclose(mapping.means_at(powers), expected, rtol=1e-14)
        assert mapping.mean_at(4.0) == pytest.approx(expected[1], rel=1e-14)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ParameterError):
            PumpMapping(THERMAL, 0.0)
        with pytest.raises(ParameterError):
            PumpMapping(THERMAL, -1.0)
        with pytest.raises(ParameterError):
            PumpMapping(THERMAL, 1.0).mean_at(-2.0)
        with pytest.raises(ParameterError):
            PairDistribution("gaussian", 1.0)


class TestSampling:
    def test_thermal_zero_mean_always_zero(self):
        rng = block_rng(1)
        draws = PairDistribution.thermal(0.0).sample(rng, size=1000)
        assert not draws.any()

    def test_scalar_draw_is_int(self):
        value = PairDistribution.thermal(1.0).sample(block_rng(2))
        assert isinstance(value, int)

    def test_thermal_vacuum_fraction(self):
        # p(0) = 0.5 at mean 1; 3 sigma of 1e6 draws is 0.0015
        draws = PairDistribution.thermal(1.0).sample(block_rng(1234), size=1_000_000)
        assert (draws == 0).mean() == pytest.approx(0.5, abs=0.0015)

    def test_poissonian_large_mean(self):
        # CLT bound: 3 * sqrt(100) / sqrt(1e6) = 0.03
        draws = PairDistribution.poissonian(100.0).sample(block_rng(1234), size=1_000_000)
        assert draws.mean() == pytest.approx(100.0, abs=0.03)

    @pytest.mark.parametrize(
        "dist", [PairDistribution.thermal(1.0), PairDistribution.poissonian(100.0)]
    )
    def test_chi_square_goodness_of_fit(self, dist):
        n = 1_000_000
        draws = dist.sample(block_rng(7), size=n)
        top = int(draws.max())
        observed = np.bincount(draws, minlength=top + 1).astype(float)
        expected = dist.pmf(np.arange(top + 1)) * n
        # lump both flanks so every compared bin expects >= 5 counts
        keep = expected >= 5.0
        first, last = int(np.argmax(keep)), int(len(keep) - 1 - np.argmax(keep[::-1]))
        observed_l = list(observed[first : last + 1])
        expected_l = list(expected[first : last + 1])
        if first > 0:
            observed_l.insert(0, observed[:first].sum())
            expected_l.insert(0, expected[:first].sum())
        observed_l.append(observed[last + 1 :].sum())
        expected_l.append(n - sum(expected_l))
        _, p_value = stats.chisquare(observed_l, expected_l)
        assert p_value > 1e-3
