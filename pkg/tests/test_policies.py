"""Policy tests.

Distributional claims are checked against exact laws derived independently:
the bootstrap estimator against a full enumeration of index tuples, the
perturbed-mean estimator against the exact binomial pseudo-sum law, and the
KL index against closed forms available when the empirical mean is 0.
"""

from __future__ import annotations

import collections
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phebandit.policies import (
    ArmState,
    FplPolicy,
    FplSpec,
    GiroPolicy,
    GiroSpec,
    KlUcbPolicy,
    KlUcbSpec,
    PhePolicy,
    PheSpec,
    Policy,
    ThompsonPolicy,
    ThompsonSpec,
    Ucb1Policy,
    Ucb1Spec,
    _klucb_block,
    binarize,
    ceil_scaled,
    fpl_learning_rate,
    giro_estimate,
    kl_bernoulli,
    klucb_index,
    make_policy,
    phe_estimate,
    phe_pseudo_sum,
    phe_pseudo_trials,
    select_arm,
    thompson_sample,
    ucb1_index,
)
from phebandit.rng import SeedSpec, derive_stream

from conftest import SIGNIFICANCE, pooled_chi2_pvalue
import statchecks

MASTER = 246813579


def fresh_stream(run_index: int = 0) -> np.random.Generator:
    return derive_stream(SeedSpec(MASTER, problem_index=0, run_index=run_index))


# ----------------------------------------------------------------- oracles


def enumerate_bootstrap_law(augmented) -> dict:
    """Exact law of the bootstrap mean by enumerating every index tuple.

    ``augmented`` is the full augmented history as integers (0/1).  Returns
    {float estimate: Fraction probability}.  Cost m**m, so keep m tiny.
    """
    m = len(augmented)
    counts = collections.Counter()
    for draw in itertools.product(range(m), repeat=m):
        total = sum(augmented[i] for i in draw)
        counts[total] += 1
    denom = Fraction(m) ** m
    return {float(Fraction(k, m)): Fraction(c) / denom for k, c in counts.items()}


def law_chi2_pvalue(samples, law) -> float:
    """Chi-squared p-value of float samples against an exact discrete law."""
    support = sorted(law)
    lookup = {v: i for i, v in enumerate(support)}
    counts = np.zeros(len(support), dtype=np.int64)
    for x in samples:
        counts[lookup[x]] += 1  # KeyError = sample outside the exact support
    probs = np.array([float(law[v]) for v in support])
    return pooled_chi2_pvalue(counts, probs)


# ------------------------------------------------------------- ceil helper


class TestCeilScaled:
    def test_snaps_float_dust_products(self):
        # 1.1 * 10 == 11.000000000000002 in floats; must not become 12
        assert ceil_scaled(1.1, 10) == 11
        # 0.3 * 10 == 2.9999999999999996; must not drop to ceil == 3 anyway
        assert ceil_scaled(0.3, 10) == 3

    def test_plain_ceiling(self):
        assert ceil_scaled(1.1, 3) == 4
        assert ceil_scaled(0.5, 3) == 2
        assert ceil_scaled(2.0, 5) == 10
        assert ceil_scaled(2.1, 1) == 3
        assert ceil_scaled(1.0, 0) == 0

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            ceil_scaled(0.0, 3)
        with pytest.raises(ValueError):
            ceil_scaled(-1.0, 3)
        with pytest.raises(ValueError):
            ceil_scaled(1.0, -1)

    @given(
        a=st.floats(min_value=0.01, max_value=50.0, allow_nan=False),
        s=st.integers(min_value=0, max_value=10_000),
    )
    def test_bracket_property(self, a, s):
        got = ceil_scaled(a, s)
        assert got >= a * s - 1e-6
        assert got < a * s + 1.0 + 1e-6

    @given(a=st.integers(min_value=1, max_value=20), s=st.integers(min_value=0, max_value=1000))
    def test_integer_scale_is_exact(self, a, s):
        assert ceil_scaled(float(a), s) == a * s


# ----------------------------------------------------------------- select_arm


class TestSelectArm:
    def test_unique_argmax_ignores_stream(self):
        stream = fresh_stream(1)
        for _ in range(50):
            assert select_arm(np.array([0.1, 0.9, 0.3]), stream) == 1

    def test_tie_frequencies_uniform(self):
        freqs = statchecks.select_arm_tie_frequencies(master_seed=MASTER)
        assert freqs.shape == (3,)
        assert np.all(np.abs(freqs - 1.0 / 3.0) <= 0.01)

    def test_partial_tie_excludes_losers(self):
        stream = fresh_stream(2)
        picks = [select_arm(np.array([2.0, 5.0, 5.0]), stream) for _ in range(4000)]
        assert 0 not in picks
        share = picks.count(1) / len(picks)
        assert abs(share - 0.5) <= 0.03

    def test_infinite_sentinels_tie(self):
        stream = fresh_stream(3)
        picks = {select_arm(np.array([np.inf, np.inf, 0.0]), stream) for _ in range(200)}
        assert picks == {0, 1}

    def test_single_element(self):
        assert select_arm(np.array([-3.0]), fresh_stream(4)) == 0

    def test_rejects_empty_and_nan(self):
        with pytest.raises(ValueError):
            select_arm(np.array([]), fresh_stream(5))
        with pytest.raises(ValueError):
            select_arm(np.array([1.0, np.nan]), fresh_stream(5))

    def test_seeded_determinism(self):
        a = [select_arm(np.array([1.0, 1.0, 1.0, 1.0]), fresh_stream(6)) for _ in range(1)]
        b = [select_arm(np.array([1.0, 1.0, 1.0, 1.0]), fresh_stream(6)) for _ in range(1)]
        assert a == b

    @given(
        values=st.lists(st.integers(min_value=-1000, max_value=1000), min_size=1, max_size=8),
        shift=st.floats(min_value=-10.0, max_value=10.0, allow_nan=False),
        seed=st.integers(min_value=0, max_value=2**31),
    )
    @settings(max_examples=60)
    def test_shift_invariance(self, values, shift, seed):
        # integer-valued indices keep their tie structure under a small shift
        arr = np.array(values, dtype=np.float64)
        got_base = select_arm(arr, derive_stream(SeedSpec(seed)))
        got_shift = select_arm(arr + shift, derive_stream(SeedSpec(seed)))
        assert got_base == got_shift


# -------------------------------------------------------------- perturbed ops


class TestPheOps:
    def test_pseudo_trials_examples(self):
        assert phe_pseudo_trials(3, 1.1) == 4
        assert phe_pseudo_trials(10, 1.1) == 11
        assert phe_pseudo_trials(2, 2.0) == 4
        assert phe_pseudo_trials(1, 0.5) == 1

    def test_estimate_worked_example(self):
        # s = 2 pulls of total reward 1.5, a = 2 injects 4 pseudo trials;
        # a pseudo sum of 2 gives (1.5 + 2) / 6
        assert phe_estimate(1.5, 2, 2, 2.0) == pytest.approx(3.5 / 6.0, rel=1e-15)

    def test_estimate_stays_in_unit_interval(self):
        stream = fresh_stream(7)
        for _ in range(500):
            s = int(stream.integers(1, 30))
            v = float(stream.random() * s)
            a = float(stream.uniform(0.1, 4.0))
            u = int(stream.integers(0, phe_pseudo_trials(s, a) + 1))
            assert 0.0 <= phe_estimate(v, u, s, a) <= 1.0

    def test_estimate_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            phe_estimate(0.5, 0, 0, 1.0)
        with pytest.raises(ValueError):
            phe_estimate(3.0, 0, 2, 1.0)  # reward_sum > pulls
        with pytest.raises(ValueError):
            phe_estimate(1.0, 5, 2, 1.0)  # pseudo_sum > trials
        with pytest.raises(ValueError):
            phe_pseudo_sum(0, 1.0, fresh_stream(8))

    def test_pseudo_sum_law(self):
        # s = 8, a = 1 injects Binomial(8, 1/2)
        stream = fresh_stream(9)
        draws = np.array([phe_pseudo_sum(8, 1.0, stream) for _ in range(100_000)])
        counts = np.bincount(draws, minlength=9)
        probs = np.array([math.comb(8, k) / 256.0 for k in range(9)])
        assert pooled_chi2_pvalue(counts, probs) > SIGNIFICANCE

    def test_estimate_moments(self):
        # s = 4, a = 2 (so exactly a*s = 8 pseudo trials), fixed V = 3:
        # mean (V + c/2)/(s + c) = 7/12, variance (c/4)/(s + c)^2 = 1/72
        stream = fresh_stream(10)
        ests = np.array(
            [phe_estimate(3.0, phe_pseudo_sum(4, 2.0, stream), 4, 2.0) for _ in range(100_000)]
        )
        assert abs(ests.mean() - 7.0 / 12.0) <= 5e-3
        assert abs(ests.var() - 1.0 / 72.0) <= 2e-3

    def test_policy_indices_match_estimate_law(self):
        # single arm, one pull of reward 1, a = 2: estimate = (1 + U)/3
        # with U ~ Binomial(2, 1/2)
        policy = PhePolicy(1, fresh_stream(11), a=2.0)
        policy.update(0, 1.0)
        law = {
            1.0 / 3.0: Fraction(1, 4),
            2.0 / 3.0: Fraction(1, 2),
            1.0: Fraction(1, 4),
        }
        samples = [float(policy.indices(t)[0]) for t in range(2, 100_002)]
        assert law_chi2_pvalue(samples, law) > SIGNIFICANCE

    def test_policy_draw_count_constant_per_round(self):
        policy = PhePolicy(5, fresh_stream(12), a=1.1)
        reward_stream = fresh_stream(13)
        for t in range(1, 6):  # initial round robin
            arm = policy.select(t)
            policy.update(arm, float(reward_stream.random()))
        deltas = []
        for t in range(6, 206):
            before = policy.pseudo_draws
            arm = policy.select(t)
            policy.update(arm, float(reward_stream.random()))
            deltas.append(policy.pseudo_draws - before)
        assert deltas == [5] * 200

    def test_policy_trials_track_ceiling(self):
        policy = PhePolicy(2, fresh_stream(14), a=1.1)
        for _ in range(10):
            policy.update(0, 1.0)
        assert policy._trials[0] == 11  # snap: not 12
        assert policy._denoms[0] == 21.0

    def test_rejects_bad_scale(self):
        with pytest.raises(ValueError):
            PhePolicy(2, fresh_stream(15), a=0.0)


# ------------------------------------------------------------------- ucb1


class TestUcb1:
    def test_worked_example(self):
        # mean 0.75 after 4 pulls at t = e^8: 0.75 + sqrt(2 * 8 / 4) = 2.75
        assert ucb1_index(ArmState(4, 3.0), math.e**8) == pytest.approx(2.75, rel=1e-12)

    def test_unpulled_is_infinite(self):
        assert ucb1_index(ArmState(0, 0.0), 5) == math.inf

    def test_first_round_has_no_bonus(self):
        assert ucb1_index(ArmState(3, 1.5), 1) == pytest.approx(0.5, rel=1e-15)

    def test_rejects_bad_round(self):
        with pytest.raises(ValueError):
            ucb1_index(ArmState(1, 1.0), 0)

    def test_policy_matches_scalar_op(self):
        policy = Ucb1Policy(5, fresh_stream(16))
        rewards = fresh_stream(17)
        for t in range(1, 201):
            arm = policy.select(t)
            policy.update(arm, float(rewards.random()))
        t = 201
        vec = policy.indices(t)
        for arm in range(5):
            assert vec[arm] == pytest.approx(ucb1_index(policy.arm_state(arm), t), rel=1e-12)


# ------------------------------------------------------------------ kl-ucb


class TestKlUcb:
    def test_kl_bernoulli_basics(self):
        assert kl_bernoulli(0.5, 0.5) == 0.0
        assert kl_bernoulli(0.0, 0.5) == pytest.approx(math.log(2.0), rel=1e-15)
        assert kl_bernoulli(1.0, 0.5) == pytest.approx(math.log(2.0), rel=1e-15)
        with pytest.raises(ValueError):
            kl_bernoulli(0.5, 1.0)
        with pytest.raises(ValueError):
            kl_bernoulli(-0.1, 0.5)

    def test_zero_mean_closed_form(self):
        # kl(0, q) = -log(1 - q), so the index is 1 - exp(-log(t)/s)
        for s, t in [(2, math.e**2), (5, 100.0), (1, 3.0), (8, 10_000.0)]:
            want = 1.0 - math.exp(-math.log(t) / s)
            got = klucb_index(ArmState(s, 0.0), t)
            assert got == pytest.approx(want, abs=2e-6)

    def test_worked_example(self):
        got = klucb_index(ArmState(2, 0.0), math.e**2)
        assert got == pytest.approx(1.0 - math.exp(-1.0), abs=2e-6)

    def test_saturated_mean_returns_one(self):
        assert klucb_index(ArmState(3, 3.0), 10) == 1.0

    def test_first_round_returns_mean(self):
        assert klucb_index(ArmState(4, 2.0), 1) == 0.5

    def test_unpulled_is_infinite(self):
        assert klucb_index(ArmState(0, 0.0), 7) == math.inf

    def test_monotone_in_round(self):
        stream = fresh_stream(18)
        for _ in range(200):
            s = int(stream.integers(1, 50))
            v = float(stream.integers(0, s + 1))
            t1 = float(stream.uniform(1.0, 1000.0))
            t2 = t1 + float(stream.uniform(0.0, 1000.0))
            assert klucb_index(ArmState(s, v), t2) >= klucb_index(ArmState(s, v), t1)

    def test_bounds(self):
        stream = fresh_stream(19)
        for _ in range(200):
            s = int(stream.integers(1, 50))
            v = float(stream.integers(0, s + 1))
            t = float(stream.uniform(1.0, 10_000.0))
            idx = klucb_index(ArmState(s, v), t)
            assert v / s <= idx <= 1.0

    def test_kernel_matches_scalar(self):
        stream = fresh_stream(20)
        pulls = np.array([0, 1, 3, 10, 40, 7, 7], dtype=np.int64)
        sums = np.array([0.0, 1.0, 0.0, 4.0, 40.0, 3.5, 7.0])
        means = np.where(pulls > 0, sums / np.maximum(pulls, 1), 0.0)
        out = np.empty(pulls.size)
        for t in [1.0, 2.0, 10.0, 1e4]:
            _klucb_block(means, pulls, math.log(t), 1e-6, 64, out)
            for i in range(pulls.size):
                want = klucb_index(ArmState(int(pulls[i]), float(sums[i])), t)
                assert out[i] == want  # bit-identical bisection

    def test_policy_binarizes_rewards(self):
        policy = KlUcbPolicy(1, fresh_stream(21))
        for _ in range(2000):
            policy.update(0, 0.3)
        successes = policy.reward_sums[0]
        assert successes == int(successes)  # integral after binarization
        assert abs(successes / 2000.0 - 0.3) <= 0.03

    def test_policy_vector_path(self):
        policy = KlUcbPolicy(3, fresh_stream(22))
        idx = policy.indices(1)
        assert np.all(np.isinf(idx))
        policy.update(1, 1.0)
        idx = policy.indices(5)
        assert np.isinf(idx[0]) and np.isinf(idx[2])
        assert idx[1] == klucb_index(ArmState(1, 1.0), 5)

    def test_rejects_bad_config(self):
        with pytest.raises(ValueError):
            KlUcbPolicy(2, fresh_stream(23), tol=0.0)
        with pytest.raises(ValueError):
            klucb_index(ArmState(1, 1.0), 0)


# ----------------------------------------------------------------- thompson


class TestThompson:
    def test_posterior_counts_for_binary_rewards(self):
        policy = ThompsonPolicy(2, fresh_stream(24))
        for r in [1.0, 1.0, 0.0]:
            policy.update(0, r)
        assert policy._alpha[0] == 3.0 and policy._beta[0] == 2.0
        assert policy._alpha[1] == 1.0 and policy._beta[1] == 1.0

    def test_scalar_op_matches_policy_draw(self):
        policy = ThompsonPolicy(1, fresh_stream(25))
        for r in [1.0, 1.0, 0.0]:
            policy.update(0, r)  # each update burns one binarization draw
        mirror = fresh_stream(25)
        for _ in range(3):
            mirror.random()
        scalar = thompson_sample(2, 1, mirror)
        assert policy.indices(4)[0] == pytest.approx(scalar, rel=1e-15)

    def test_index_mean_matches_posterior_mean(self):
        policy = ThompsonPolicy(1, fresh_stream(26))
        for r in [1.0, 1.0, 0.0]:
            policy.update(0, r)
        draws = np.array([policy.indices(5)[0] for _ in range(50_000)])
        assert abs(draws.mean() - 0.6) <= 5e-3  # Beta(3, 2) mean

    def test_binarize_frequency(self):
        stream = fresh_stream(27)
        hits = sum(binarize(0.3, stream) for _ in range(100_000))
        assert abs(hits / 100_000.0 - 0.3) <= 0.01

    def test_binarize_degenerate(self):
        stream = fresh_stream(28)
        assert all(binarize(1.0, stream) == 1 for _ in range(100))
        assert all(binarize(0.0, stream) == 0 for _ in range(100))
        with pytest.raises(ValueError):
            binarize(1.5, stream)

    def test_thompson_sample_rejects_negative(self):
        with pytest.raises(ValueError):
            thompson_sample(-1, 0, fresh_stream(29))


# -------------------------------------------------------------------- giro


class TestGiro:
    def test_enumeration_law_single_one(self):
        # history [1], a = 1: augmented [1, 0, 1], all 27 tuples enumerated
        law = enumerate_bootstrap_law([1, 0, 1])
        want = {
            0.0: Fraction(1, 27),
            float(Fraction(1, 3)): Fraction(6, 27),
            float(Fraction(2, 3)): Fraction(12, 27),
            1.0: Fraction(8, 27),
        }
        assert law == want

    def test_index_route_matches_enumeration(self):
        law = enumerate_bootstrap_law([1, 0, 1])
        stream = fresh_stream(30)
        samples = [giro_estimate([1.0], 1.0, stream) for _ in range(100_000)]
        assert law_chi2_pvalue(samples, law) > SIGNIFICANCE

    def test_multinomial_route_matches_enumeration(self):
        law = enumerate_bootstrap_law([1, 0, 1])
        stream = fresh_stream(31)
        samples = [
            giro_estimate([1.0], 1.0, stream, exact_multinomial=True) for _ in range(100_000)
        ]
        assert law_chi2_pvalue(samples, law) > SIGNIFICANCE

    def test_statchecks_agreement(self):
        assert statchecks.giro_bootstrap_pvalue(master_seed=MASTER) > SIGNIFICANCE

    def test_two_reward_history_law(self):
        # history [1, 0], a = 0.5: one pseudo 1 and one pseudo 0, m = 4
        law = enumerate_bootstrap_law([1, 0, 1, 0])
        stream = fresh_stream(32)
        samples = [giro_estimate([1.0, 0.0], 0.5, stream) for _ in range(100_000)]
        assert law_chi2_pvalue(samples, law) > SIGNIFICANCE

    def test_policy_route_matches_enumeration(self):
        # the batched per-round resampler must realize the same law as the
        # scalar estimator
        law = enumerate_bootstrap_law([1, 0, 1])
        policy = GiroPolicy(1, fresh_stream(33), a=1.0)
        policy.update(0, 1.0)
        samples = [float(policy.indices(t)[0]) for t in range(2, 100_002)]
        assert law_chi2_pvalue(samples, law) > SIGNIFICANCE

    def test_policy_batched_multiarm_stays_on_support(self):
        policy = GiroPolicy(3, fresh_stream(34), a=1.0)
        rewards = fresh_stream(35)
        for t in range(1, 200):
            arm = policy.select(t)
            policy.update(arm, float(rewards.integers(0, 2)))
        idx = policy.indices(200)
        for arm in range(3):
            s = int(policy.pulls[arm])
            m = s + 2 * ceil_scaled(1.0, s)
            # estimate is a multiple of 1/m inside [0, 1]
            assert 0.0 <= idx[arm] <= 1.0
            assert idx[arm] * m == pytest.approx(round(idx[arm] * m), abs=1e-9)

    def test_history_storage_grows_with_pulls(self):
        policy = GiroPolicy(2, fresh_stream(36), a=1.0)
        rewards = [0.2, 0.8, 1.0, 0.0, 0.5]
        for r in rewards:
            policy.update(0, r)
        assert policy.history(0).tolist() == rewards
        assert policy.history(1).size == 0
        assert policy._pseudo[0] == 5

    def test_estimate_rejects_bad_inputs(self):
        stream = fresh_stream(37)
        with pytest.raises(ValueError):
            giro_estimate([], 1.0, stream)
        with pytest.raises(ValueError):
            giro_estimate([1.5], 1.0, stream)
        with pytest.raises(ValueError):
            giro_estimate([0.5], 0.0, stream)
        with pytest.raises(ValueError):
            GiroPolicy(2, stream, a=-1.0)


# --------------------------------------------------------------------- fpl


class TestFpl:
    def test_learning_rate_formula(self):
        assert fpl_learning_rate(3, 7) == pytest.approx(
            math.sqrt(math.log(3.0) / 21.0), rel=1e-15
        )
        assert fpl_learning_rate(3, 7, scale=2.5) == pytest.approx(
            2.5 * math.sqrt(math.log(3.0) / 21.0), rel=1e-15
        )
        assert fpl_learning_rate(1, 10) == 0.0
        with pytest.raises(ValueError):
            fpl_learning_rate(0, 1)
        with pytest.raises(ValueError):
            fpl_learning_rate(2, 1, scale=0.0)

    def test_adaptive_cap(self):
        policy = FplPolicy(3, fresh_stream(38))
        policy._last_eta = fpl_learning_rate(3, 4)
        want = math.ceil(3.0 / math.sqrt(math.log(3.0) / 12.0))
        assert policy._round_cap() == want

    def test_explicit_cap_one_makes_losses_exact(self):
        policy = FplPolicy(2, fresh_stream(39), resample_cap=1)
        # zero-reward pulls add exactly 1 to the pulled arm's loss estimate
        for t in range(1, 7):
            arm = policy.select(t)
            policy.update(arm, 0.0)
        assert policy.loss_estimates.sum() == pytest.approx(6.0, rel=1e-15)
        assert np.all(policy.loss_estimates == policy.pulls)

    def test_single_arm_degenerates(self):
        policy = FplPolicy(1, fresh_stream(40))
        for t in range(1, 50):
            assert policy.select(t) == 0
            policy.update(0, 0.0)
        # leader always recurs on the first redraw
        assert np.all(policy.loss_estimates == policy.pulls)

    def test_geometric_resampling_mean(self):
        # two arms, equal losses, no sentinels: recurrence probability 1/2,
        # so the resample count is Geometric(1/2) with mean 2 (cap lifted)
        policy = FplPolicy(2, fresh_stream(41), resample_cap=10_000)
        policy.update(0, 1.0)  # loss 0 keeps estimates at zero
        policy.update(1, 1.0)
        policy._last_eta = fpl_learning_rate(2, 3)
        draws = np.array([policy._geometric_resample(0) for _ in range(20_000)])
        assert abs(draws.mean() - 2.0) <= 0.06
        counts = np.append(np.bincount(draws, minlength=11)[1:11], (draws >= 11).sum())
        probs = np.array([0.5**k for k in range(1, 11)] + [0.5**10])
        assert pooled_chi2_pvalue(counts, probs) > SIGNIFICANCE

    def test_adaptive_cap_binds(self):
        # K = 2 at t = 3: cap = ceil(2 / eta) = 6, so no draw exceeds 6
        policy = FplPolicy(2, fresh_stream(41))
        policy.update(0, 1.0)
        policy.update(1, 1.0)
        policy._last_eta = fpl_learning_rate(2, 3)
        assert policy._round_cap() == 6
        draws = [policy._geometric_resample(0) for _ in range(5000)]
        assert max(draws) == 6

    def test_update_caps_resampling(self):
        policy = FplPolicy(2, fresh_stream(42), resample_cap=3)
        policy.update(0, 1.0)
        policy.update(1, 1.0)
        draws = [policy._geometric_resample(0) for _ in range(2000)]
        assert max(draws) <= 3
        assert min(draws) >= 1

    def test_rejects_bad_config(self):
        with pytest.raises(ValueError):
            FplPolicy(2, fresh_stream(43), learning_rate_scale=0.0)
        with pytest.raises(ValueError):
            FplPolicy(2, fresh_stream(43), resample_cap=0)


# ------------------------------------------------------------ driver contract


ALL_SPECS = [
    PheSpec(a=1.1),
    Ucb1Spec(),
    KlUcbSpec(),
    ThompsonSpec(),
    GiroSpec(a=1.0),
    FplSpec(),
]


class TestDriverContract:
    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: type(s).__name__)
    def test_first_round_indices_all_infinite(self, spec):
        policy = make_policy(spec, 4, fresh_stream(44))
        assert np.all(np.isinf(policy.indices(1)))

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: type(s).__name__)
    def test_initial_round_robin_covers_every_arm(self, spec):
        policy = make_policy(spec, 6, fresh_stream(45))
        rewards = fresh_stream(46)
        seen = []
        for t in range(1, 7):
            arm = policy.select(t)
            seen.append(arm)
            policy.update(arm, float(rewards.random()))
        assert sorted(seen) == list(range(6))
        assert np.all(policy.pulls == 1)

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: type(s).__name__)
    def test_reward_validation(self, spec):
        policy = make_policy(spec, 3, fresh_stream(47))
        with pytest.raises(ValueError):
            policy.update(0, -0.1)
        with pytest.raises(ValueError):
            policy.update(0, 1.1)
        with pytest.raises(IndexError):
            policy.update(3, 0.5)

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: type(s).__name__)
    def test_seeded_trajectories_are_reproducible(self, spec):
        def run():
            policy = make_policy(spec, 4, fresh_stream(48))
            rewards = fresh_stream(49)
            arms = []
            for t in range(1, 60):
                arm = policy.select(t)
                arms.append(arm)
                policy.update(arm, float(rewards.integers(0, 2)))
            return arms

        assert run() == run()

    def test_make_policy_dispatch(self):
        stream = fresh_stream(50)
        assert isinstance(make_policy(PheSpec(a=2.1), 2, stream), PhePolicy)
        assert isinstance(make_policy(Ucb1Spec(), 2, stream), Ucb1Policy)
        assert isinstance(make_policy(KlUcbSpec(), 2, stream), KlUcbPolicy)
        assert isinstance(make_policy(ThompsonSpec(), 2, stream), ThompsonPolicy)
        assert isinstance(make_policy(GiroSpec(), 2, stream), GiroPolicy)
        assert isinstance(make_policy(FplSpec(), 2, stream), FplPolicy)
        with pytest.raises(TypeError):
            make_policy(object(), 2, stream)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            PheSpec(a=0.0)
        with pytest.raises(ValueError):
            GiroSpec(a=-1.0)
        with pytest.raises(ValueError):
            KlUcbSpec(tol=-1.0)
        with pytest.raises(ValueError):
            FplSpec(learning_rate_scale=-2.0)
        with pytest.raises(ValueError):
            FplSpec(resample_cap=0)

    def test_policy_rejects_zero_arms(self):
        with pytest.raises(ValueError):
            Ucb1Policy(0, fresh_stream(51))

    def test_arm_state_validation(self):
        with pytest.raises(ValueError):
            ArmState(-1, 0.0)
        with pytest.raises(ValueError):
            ArmState(2, 3.0)
        with pytest.raises(ValueError):
            ArmState(0, 0.0).mean
