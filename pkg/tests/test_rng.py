"""Stream derivation, samplers, and exact binomial tails."""

import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

import statchecks
from conftest import SIGNIFICANCE, N_DIST_SAMPLES
from phebandit.rng import (
    BetaParams,
    BinomialParams,
    SeedSpec,
    binomial_cdf,
    binomial_pmf,
    binomial_tail,
    derive_stream,
    sample_beta,
    sample_binomial,
)

MASTER = 987650123


def enumerated_tail(threshold, trials, p):
    """Brute-force P(X >= threshold) over all 2^trials outcome tuples.

    Exact rational arithmetic; independent of any closed-form pmf.
    """
    p = Fraction(p)
    total = Fraction(0)
    for outcome in product((0, 1), repeat=trials):
        ones = sum(outcome)
        if ones >= threshold:
            total += p**ones * (1 - p) ** (trials - ones)
    return total


class TestDeriveStream:
    def test_same_spec_reproduces_draws(self):
        a = derive_stream(SeedSpec(MASTER, 3, 2))
        b = derive_stream(SeedSpec(MASTER, 3, 2))
        assert np.array_equal(a.integers(0, 2**63, 128), b.integers(0, 2**63, 128))

    def test_distinct_tuples_distinct_first_words(self):
        specs = [SeedSpec(MASTER, p, r) for p in range(6) for r in range(5)]
        specs += [
            SeedSpec(MASTER + 1),
            SeedSpec(0),
            SeedSpec(1),
            SeedSpec(MASTER, 0, 0, round_index=0),
            SeedSpec(MASTER, 0, 0, round_index=1),
        ]
        firsts = [tuple(derive_stream(s).integers(0, 2**63, 4)) for s in specs]
        assert len(set(firsts)) == len(firsts)

    @pytest.mark.parametrize(
        "other",
        [
            SeedSpec(MASTER, 0, 2),
            SeedSpec(MASTER, 1, 1),
            SeedSpec(MASTER + 1, 0, 1),
        ],
    )
    def test_no_shared_prefix_in_first_million(self, other):
        base = derive_stream(SeedSpec(MASTER, 0, 1)).integers(0, 2**63, 1_000_000)
        alt = derive_stream(other).integers(0, 2**63, 1_000_000)
        assert base[0] != alt[0]
        assert not np.array_equal(base, alt)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(master_seed=-1),
            dict(master_seed=1.5),
            dict(master_seed=True),
            dict(master_seed=1, problem_index=-2),
            dict(master_seed=1, run_index=-1),
            dict(master_seed=1, round_index=-3),
        ],
    )
    def test_bad_coordinates_rejected(self, kwargs):
        with pytest.raises(ValueError):
            SeedSpec(**kwargs)


class TestSampleBinomial:
    def test_zero_trials_gives_zero(self):
        stream = derive_stream(SeedSpec(7))
        assert sample_binomial(BinomialParams(0, 0.3), stream) == 0

    def test_p_one_gives_trials(self):
        stream = derive_stream(SeedSpec(7))
        assert all(
            sample_binomial(BinomialParams(9, 1.0), stream) == 9 for _ in range(50)
        )

    def test_p_zero_gives_zero(self):
        stream = derive_stream(SeedSpec(7))
        assert all(
            sample_binomial(BinomialParams(9, 0.0), stream) == 0 for _ in range(50)
        )

    def test_chi_squared_against_exact_pmf(self):
        assert statchecks.binomial_sampler_pvalue() > SIGNIFICANCE

    @pytest.mark.parametrize("trials,p", [(-1, 0.5), (3, -0.1), (3, 1.1), (2.5, 0.5)])
    def test_bad_params_rejected(self, trials, p):
        with pytest.raises(ValueError):
            BinomialParams(trials, p)


class TestSampleBeta:
    def test_uniform_special_case_moments(self):
        stream = derive_stream(SeedSpec(21))
        params = BetaParams(1.0, 1.0)
        draws = np.fromiter(
            (sample_beta(params, stream) for _ in range(N_DIST_SAMPLES)),
            dtype=float,
            count=N_DIST_SAMPLES,
        )
        assert abs(draws.mean() - 0.5) < 5e-3
        assert abs(draws.var() - 1.0 / 12.0) < 2e-3

    def test_skewed_moments(self):
        # Beta(2, 6): mean 1/4, variance 12/(64*9)
        stream = derive_stream(SeedSpec(22))
        params = BetaParams(2.0, 6.0)
        draws = np.fromiter(
            (sample_beta(params, stream) for _ in range(N_DIST_SAMPLES)),
            dtype=float,
            count=N_DIST_SAMPLES,
        )
        assert abs(draws.mean() - 0.25) < 5e-3
        assert abs(draws.var() - 12.0 / 576.0) < 2e-3

    def test_chi_squared_against_beta_cdf(self):
        assert statchecks.beta_sampler_pvalue() > SIGNIFICANCE

    @pytest.mark.parametrize("alpha,beta", [(0.0, 1.0), (1.0, 0.0), (-1.0, 2.0)])
    def test_bad_params_rejected(self, alpha, beta):
        with pytest.raises(ValueError):
            BetaParams(alpha, beta)


class TestBinomialTail:
    @pytest.mark.parametrize(
        "threshold,trials,p",
        [(2, 4, Fraction(1, 2)), (1, 2, Fraction(1, 2)), (3, 7, Fraction(3, 10)),
         (5, 11, Fraction(9, 10)), (0, 5, Fraction(1, 3)), (6, 6, Fraction(1, 4))],
    )
    def test_matches_outcome_enumeration(self, threshold, trials, p):
        want = float(enumerated_tail(threshold, trials, p))
        got = binomial_tail(threshold, trials, float(p))
        assert got == pytest.approx(want, rel=1e-14, abs=1e-300)

    def test_known_exact_values(self):
        assert binomial_tail(2, 4, 0.5) == pytest.approx(11.0 / 16.0, rel=1e-15)
        assert binomial_tail(1, 2, 0.5) == pytest.approx(3.0 / 4.0, rel=1e-15)

    def test_degenerate_thresholds(self):
        assert binomial_tail(0, 5, 0.2) == 1.0
        assert binomial_tail(-3, 5, 0.2) == 1.0
        assert binomial_tail(2, 1, 0.99) == 0.0

    def test_degenerate_p(self):
        assert binomial_tail(1, 4, 0.0) == 0.0
        assert binomial_tail(4, 4, 1.0) == 1.0
        assert binomial_tail(5, 4, 1.0) == 0.0

    @pytest.mark.parametrize(
        "trials,p",
        [(10, 0.5), (100, 0.3), (999, 0.7), (1001, 0.5), (5000, 0.03), (10_000, 0.5)],
    )
    def test_complement_identity(self, trials, p):
        # P(X >= k) + P(X <= k-1) = 1, both sides summed independently
        ks = sorted({1, trials // 3, trials // 2, (2 * trials) // 3, trials})
        for k in ks:
            total = binomial_tail(k, trials, p) + binomial_cdf(k - 1, trials, p)
            assert total == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize(
        "trials,p",
        [(10, 0.5), (250, 0.01), (600, 0.97), (999, 0.5)],
    )
    def test_against_scipy_survival(self, trials, p):
        # direct summation branch vs scipy's incomplete-beta route
        mean = trials * p
        sd = max(1.0, math.sqrt(trials * p * (1 - p)))
        ks = sorted(
            {
                max(1, int(mean - 3 * sd)),
                max(1, int(mean)),
                min(trials, int(mean + 3 * sd)),
                min(trials, int(mean + 8 * sd)),
                trials,
            }
        )
        for k in ks:
            ref = float(sps.binom.sf(k - 1, trials, p))
            got = binomial_tail(k, trials, p)
            assert got == pytest.approx(ref, rel=1e-12, abs=1e-280)

    @pytest.mark.parametrize(
        "threshold,trials,p,reference",
        [
            # references computed with 40-digit mpmath summation
            (530, 1001, 0.5, 0.033359279656547343),
            (5100, 10_000, 0.5, 0.023292763852473694),
            (119, 10_000, 0.01, 0.034189229721711215),
            (50_474, 100_000, 0.5, 0.0013735887218917699),
            (501_000, 1_000_000, 0.5, 0.022804149932691043),
            (503_000, 1_000_000, 0.5, 9.9257488196151038e-10),
        ],
    )
    def test_large_trials_match_high_precision_reference(
        self, threshold, trials, p, reference
    ):
        got = binomial_tail(threshold, trials, p)
        assert got == pytest.approx(reference, rel=1e-12)

    def test_deep_tail_keeps_relative_precision(self):
        # P(Bin(400, 1/2) = 400) = 2^-400: far below 1e-300 scale errors
        assert binomial_tail(400, 400, 0.5) == pytest.approx(2.0**-400, rel=1e-12)

    def test_pmf_sums_to_one(self):
        for trials, p in [(13, 0.35), (64, 0.5)]:
            s = math.fsum(binomial_pmf(k, trials, p) for k in range(trials + 1))
            assert s == pytest.approx(1.0, abs=1e-13)

    @pytest.mark.parametrize("args", [(1.5, 4, 0.5), (2, -1, 0.5), (2, 4, 1.5)])
    def test_bad_args_rejected(self, args):
        with pytest.raises(ValueError):
            binomial_tail(*args)

    @settings(max_examples=80, deadline=None)
    @given(
        trials=st.integers(0, 300),
        p=st.floats(0.0, 1.0, allow_nan=False),
        threshold=st.integers(-2, 302),
    )
    def test_bounds_and_monotonicity(self, trials, p, threshold):
        value = binomial_tail(threshold, trials, p)
        assert 0.0 <= value <= 1.0
        assert binomial_tail(threshold + 1, trials, p) <= value + 1e-15

    @settings(max_examples=60, deadline=None)
    @given(
        trials=st.integers(1, 400),
        p=st.floats(0.01, 0.99),
        threshold=st.integers(0, 400),
    )
    def test_complement_property(self, trials, p, threshold):
        threshold = min(threshold, trials)
        total = binomial_tail(threshold, trials, p) + binomial_cdf(
            threshold - 1, trials, p
        )
        assert total == pytest.approx(1.0, abs=1e-12)
