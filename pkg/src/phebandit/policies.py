"""Bandit policies sharing one driver contract.

Every policy exposes per-arm index values for the current round; the driver
plays the argmax (uniform random tie-break) and feeds back exactly one
reward.  Arms never pulled carry a +inf sentinel, which forces a randomized
round-robin over the first K rounds for every policy.

The headline policy re-estimates each explored arm every round after
injecting ceil(a*s) fresh fair-coin pseudo-rewards into its history; its
per-round cost stays O(K).  The bootstrap baseline stores and resamples full
reward histories, so its per-round cost grows with t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

__all__ = [
    "ArmState",
    "ceil_scaled",
    "select_arm",
    "kl_bernoulli",
    "phe_pseudo_trials",
    "phe_pseudo_sum",
    "phe_estimate",
    "ucb1_index",
    "klucb_index",
    "thompson_sample",
    "binarize",
    "giro_estimate",
    "fpl_learning_rate",
    "Policy",
    "PhePolicy",
    "Ucb1Policy",
    "KlUcbPolicy",
    "ThompsonPolicy",
    "GiroPolicy",
    "FplPolicy",
    "PheSpec",
    "Ucb1Spec",
    "KlUcbSpec",
    "ThompsonSpec",
    "GiroSpec",
    "FplSpec",
    "PolicySpec",
    "SPEC_TYPES",
    "make_policy",
]

KLUCB_TOL = 1e-6
KLUCB_MAX_ITER = 64
FPL_CAP_LIMIT = 10_000


def ceil_scaled(a: float, s: int) -> int:
    """ceil(a * s), snapping products that are integers up to float dust.

    Without the snap, 1.1 * 10 = 11.000000000000002 would ceil to 12 and
    silently inflate every pseudo-count.
    """
    if not a > 0.0:
        raise ValueError(f"scale a must be positive, got {a!r}")
    if s < 0:
        raise ValueError(f"count must be nonnegative, got {s!r}")
    x = a * s
    nearest = round(x)
    if abs(x - nearest) <= 1e-9 * max(1.0, abs(x)):
        return int(nearest)
    return int(math.ceil(x))


def select_arm(values: np.ndarray, stream: np.random.Generator) -> int:
    """Argmax with uniform random tie-breaking (handles +inf sentinels)."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("empty index vector")
    top = values.max()
    if math.isnan(top):
        raise ValueError("index vector contains NaN")
    ties = np.flatnonzero(values == top)
    if ties.size == 1:
        return int(ties[0])
    return int(ties[int(stream.integers(ties.size))])


def kl_bernoulli(p: float, q: float) -> float:
    """KL(Ber(p) || Ber(q)) in nats, with the 0 log 0 = 0 convention."""
    if not (0.0 <= p <= 1.0 and 0.0 < q < 1.0):
        raise ValueError(f"need p in [0,1], q in (0,1); got {p!r}, {q!r}")
    out = 0.0
    if p > 0.0:
        out += p * math.log(p / q)
    if p < 1.0:
        out += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return out


def _validate_reward(reward: float) -> None:
    if not 0.0 <= reward <= 1.0:
        raise ValueError(f"reward outside [0, 1]: {reward!r}")


@dataclass(frozen=True)
class ArmState:
    """Sufficient statistics of one arm: pull count and reward sum."""

    pulls: int
    reward_sum: float

    def __post_init__(self) -> None:
        if self.pulls < 0:
            raise ValueError(f"pulls must be nonnegative, got {self.pulls!r}")
        if not -1e-9 <= self.reward_sum <= self.pulls + 1e-9:
            raise ValueError(
                f"reward_sum must lie in [0, pulls], got {self.reward_sum!r} "
                f"with {self.pulls} pulls"
            )

    @property
    def mean(self) -> float:
        if self.pulls == 0:
            raise ValueError("mean of an unpulled arm is undefined")
        return self.reward_sum / self.pulls


# ------------------------------------------------------------------ scalar ops


def phe_pseudo_trials(pulls: int, a: float) -> int:
    """Number of pseudo-rewards injected for an arm with ``pulls`` pulls."""
    return ceil_scaled(a, pulls)


def phe_pseudo_sum(pulls: int, a: float, stream: np.random.Generator) -> int:
    """Fresh Binomial(ceil(a * pulls), 1/2) draw; redrawn on every call."""
    if pulls < 1:
        raise ValueError("pseudo-rewards only exist for pulled arms")
    return int(stream.binomial(phe_pseudo_trials(pulls, a), 0.5))


def phe_estimate(reward_sum: float, pseudo_sum: int, pulls: int, a: float) -> float:
    """Perturbed mean (V + U) / (s + ceil(a * s)); always lands in [0, 1]."""
    if pulls < 1:
        raise ValueError("estimate needs at least one pull")
    trials = phe_pseudo_trials(pulls, a)
    if not 0.0 <= reward_sum <= pulls:
        raise ValueError(f"reward_sum {reward_sum!r} outside [0, {pulls}]")
    if not 0 <= pseudo_sum <= trials:
        raise ValueError(f"pseudo_sum {pseudo_sum!r} outside [0, {trials}]")
    return (reward_sum + pseudo_sum) / (pulls + trials)


def ucb1_index(state: ArmState, t: int) -> float:
    """Empirical mean plus the sqrt(2 log t / s) confidence width."""
    if t < 1:
        raise ValueError(f"round number must be >= 1, got {t!r}")
    if state.pulls == 0:
        return math.inf
    return state.mean + math.sqrt(2.0 * math.log(t) / state.pulls)


def _klucb_scalar(p_hat: float, budget: float, tol: float, max_iter: int) -> float:
    # largest q in [p_hat, 1) with kl(p_hat, q) <= budget, by bisection
    if p_hat >= 1.0:
        return 1.0
    if budget <= 0.0:
        return p_hat
    lo = p_hat
    hi = 1.0
    it = 0
    while hi - lo > tol and it < max_iter:
        mid = 0.5 * (lo + hi)
        if p_hat > 0.0:
            kl = p_hat * math.log(p_hat / mid) + (1.0 - p_hat) * math.log(
                (1.0 - p_hat) / (1.0 - mid)
            )
        else:
            kl = math.log(1.0 / (1.0 - mid))
        if kl <= budget:
            lo = mid
        else:
            hi = mid
        it += 1
    return lo


def klucb_index(
    state: ArmState, t: int, tol: float = KLUCB_TOL, max_iter: int = KLUCB_MAX_ITER
) -> float:
    """Largest q with pulls * kl(mean, q) <= log t, found by bisection."""
    if t < 1:
        raise ValueError(f"round number must be >= 1, got {t!r}")
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter!r}")
    if state.pulls == 0:
        return math.inf
    budget = math.log(t) / state.pulls
    return _klucb_scalar(state.mean, budget, tol, max_iter)


def thompson_sample(successes: int, failures: int, stream: np.random.Generator) -> float:
    """One posterior draw from Beta(1 + successes, 1 + failures)."""
    if successes < 0 or failures < 0:
        raise ValueError("counts must be nonnegative")
    return float(stream.beta(1.0 + successes, 1.0 + failures))


def binarize(reward: float, stream: np.random.Generator) -> int:
    """1 with probability ``reward``: feeds [0,1] rewards to 0/1 policies."""
    _validate_reward(reward)
    return 1 if stream.random() < reward else 0


def giro_estimate(
    history: Sequence[float],
    a: float,
    stream: np.random.Generator,
    exact_multinomial: bool = False,
) -> float:
    """Bootstrap mean of ``history`` augmented with ceil(a*s) ones and zeros.

    The resample has the same size as the augmented history.  The
    ``exact_multinomial`` route draws category counts instead of indices;
    both realize exactly the same resampling law.
    """
    history = np.asarray(history, dtype=np.float64)
    if history.ndim != 1 or history.size < 1:
        raise ValueError("history must be a nonempty 1-d sequence")
    if history.min() < 0.0 or history.max() > 1.0:
        raise ValueError("history rewards must lie in [0, 1]")
    s = history.size
    c = ceil_scaled(a, s)
    m = s + 2 * c
    # augmented layout: [ones | zeros | history]
    if exact_multinomial:
        counts = stream.multinomial(m, np.full(m, 1.0 / m))
        return float((counts[:c].sum() + counts[2 * c :].dot(history)) / m)
    idx = stream.integers(0, m, size=m)
    ones = int((idx < c).sum())
    real = idx >= 2 * c
    return float((ones + history[idx[real] - 2 * c].sum()) / m)


def fpl_learning_rate(num_arms: int, t: int, scale: float = 1.0) -> float:
    """Anytime rate scale * sqrt(log(K) / (t K)); zero when K = 1."""
    if num_arms < 1 or t < 1:
        raise ValueError("need num_arms >= 1 and t >= 1")
    if not scale > 0.0:
        raise ValueError(f"scale must be positive, got {scale!r}")
    return scale * math.sqrt(math.log(num_arms) / (t * num_arms))


# ------------------------------------------------------- vector kl-ucb kernel


def _klucb_block(means, pulls, log_t, tol, max_iter, out):  # pragma: no cover
    for i in range(means.shape[0]):
        s = pulls[i]
        if s == 0:
            out[i] = np.inf
            continue
        p = means[i]
        if p >= 1.0:
            out[i] = 1.0
            continue
        budget = log_t / s
        if budget <= 0.0:
            out[i] = p
            continue
        lo = p
        hi = 1.0
        it = 0
        while hi - lo > tol and it < max_iter:
            mid = 0.5 * (lo + hi)
            if p > 0.0:
                kl = p * math.log(p / mid) + (1.0 - p) * math.log(
                    (1.0 - p) / (1.0 - mid)
                )
            else:
                kl = math.log(1.0 / (1.0 - mid))
            if kl <= budget:
                lo = mid
            else:
                hi = mid
            it += 1
        out[i] = lo


try:  # the jit is a speedup only; the python loop is the reference behavior
    from numba import njit

    _klucb_block = njit(cache=True, nogil=True)(_klucb_block)
except ImportError:  # pragma: no cover
    pass


# ------------------------------------------------------------------- policies


class Policy:
    """Shared state and driver interface; subclasses fill in ``indices``."""

    def __init__(self, num_arms: int, stream: np.random.Generator):
        if num_arms < 1:
            raise ValueError(f"need at least one arm, got {num_arms!r}")
        self.num_arms = num_arms
        self.stream = stream
        self.pulls = np.zeros(num_arms, dtype=np.int64)
        self.reward_sums = np.zeros(num_arms, dtype=np.float64)

    def indices(self, t: int) -> np.ndarray:
        raise NotImplementedError

    def select(self, t: int) -> int:
        """Pick this round's arm: argmax of indices, uniform over ties."""
        return select_arm(self.indices(t), self.stream)

    def _transform(self, reward: float) -> float:
        return reward

    def _after_update(self, arm: int) -> None:
        pass

    def update(self, arm: int, reward: float) -> None:
        """Feed back the pulled arm's reward; touches only that arm's state."""
        if not 0 <= arm < self.num_arms:
            raise IndexError(f"arm {arm} out of range")
        _validate_reward(reward)
        self.pulls[arm] += 1
        self.reward_sums[arm] += self._transform(reward)
        self._after_update(arm)

    def arm_state(self, arm: int) -> ArmState:
        return ArmState(int(self.pulls[arm]), float(self.reward_sums[arm]))


class PhePolicy(Policy):
    """Perturbed-history exploration with pseudo-count scale ``a``.

    Every round, every explored arm gets a fresh Binomial(ceil(a*s), 1/2)
    pseudo-reward sum mixed into its mean; exploration comes entirely from
    that perturbation.  Work per round: one K-wide binomial draw plus O(K)
    arithmetic, independent of t.
    """

    def __init__(self, num_arms: int, stream: np.random.Generator, a: float):
        super().__init__(num_arms, stream)
        if not a > 0.0:
            raise ValueError(f"perturbation scale a must be positive, got {a!r}")
        self.a = float(a)
        self._trials = np.zeros(num_arms, dtype=np.int64)
        self._denoms = np.ones(num_arms, dtype=np.float64)  # guard: never 0
        self.pseudo_draws = 0  # instrumentation: binomial draws consumed so far

    def indices(self, t: int) -> np.ndarray:
        pseudo = self.stream.binomial(self._trials, 0.5)
        explored = self.pulls > 0
        self.pseudo_draws += int(explored.sum())
        est = (self.reward_sums + pseudo) / self._denoms
        return np.where(explored, est, np.inf)

    def _after_update(self, arm: int) -> None:
        s = int(self.pulls[arm])
        self._trials[arm] = ceil_scaled(self.a, s)
        self._denoms[arm] = s + self._trials[arm]


class Ucb1Policy(Policy):
    """Deterministic optimism: mean + sqrt(2 log t / s)."""

    def __init__(self, num_arms: int, stream: np.random.Generator):
        super().__init__(num_arms, stream)
        self._means = np.full(num_arms, np.inf)
        self._inv_sqrt = np.zeros(num_arms)  # inf + 0 keeps the sentinel

    def indices(self, t: int) -> np.ndarray:
        return self._means + math.sqrt(2.0 * math.log(t)) * self._inv_sqrt

    def _after_update(self, arm: int) -> None:
        s = self.pulls[arm]
        self._means[arm] = self.reward_sums[arm] / s
        self._inv_sqrt[arm] = 1.0 / math.sqrt(s)


class KlUcbPolicy(Policy):
    """KL-UCB on binarized rewards: largest q with s * kl(mean, q) <= log t."""

    def __init__(
        self,
        num_arms: int,
        stream: np.random.Generator,
        tol: float = KLUCB_TOL,
        max_iter: int = KLUCB_MAX_ITER,
    ):
        super().__init__(num_arms, stream)
        if not tol > 0.0 or max_iter < 1:
            raise ValueError("need tol > 0 and max_iter >= 1")
        self.tol = float(tol)
        self.max_iter = int(max_iter)
        self._means = np.zeros(num_arms)
        self._out = np.empty(num_arms)

    def _transform(self, reward: float) -> float:
        return float(binarize(reward, self.stream))

    def indices(self, t: int) -> np.ndarray:
        _klucb_block(
            self._means, self.pulls, math.log(t), self.tol, self.max_iter, self._out
        )
        return self._out

    def _after_update(self, arm: int) -> None:
        self._means[arm] = self.reward_sums[arm] / self.pulls[arm]


class ThompsonPolicy(Policy):
    """Beta-Bernoulli posterior sampling on binarized rewards."""

    def __init__(self, num_arms: int, stream: np.random.Generator):
        super().__init__(num_arms, stream)
        self._alpha = np.ones(num_arms)
        self._beta = np.ones(num_arms)

    def _transform(self, reward: float) -> float:
        return float(binarize(reward, self.stream))

    def indices(self, t: int) -> np.ndarray:
        draws = self.stream.beta(self._alpha, self._beta)
        return np.where(self.pulls > 0, draws, np.inf)

    def _after_update(self, arm: int) -> None:
        # reward_sums holds binarized successes for this policy
        self._alpha[arm] = 1.0 + self.reward_sums[arm]
        self._beta[arm] = 1.0 + (self.pulls[arm] - self.reward_sums[arm])


class GiroPolicy(Policy):
    """History bootstrap with ceil(a*s) forced 1s and 0s per explored arm.

    Stores every observed reward and resamples each arm's augmented history
    every round (all arms' resamples batched into one uniform block).  The
    stored-history growth and O(t) per-round cost are the point of this
    baseline.
    """

    def __init__(
        self,
        num_arms: int,
        stream: np.random.Generator,
        a: float = 1.0,
        exact_multinomial: bool = False,
    ):
        super().__init__(num_arms, stream)
        if not a > 0.0:
            raise ValueError(f"pseudo-history scale a must be positive, got {a!r}")
        self.a = float(a)
        self.exact_multinomial = bool(exact_multinomial)
        self._buffers: List[np.ndarray] = [np.empty(8) for _ in range(num_arms)]
        self._pseudo = np.zeros(num_arms, dtype=np.int64)  # ceil(a*s) per arm

    def history(self, arm: int) -> np.ndarray:
        return self._buffers[arm][: self.pulls[arm]]

    def _after_update(self, arm: int) -> None:
        s = int(self.pulls[arm])
        buf = self._buffers[arm]
        if s > buf.size:
            grown = np.empty(2 * buf.size)
            grown[: buf.size] = buf
            self._buffers[arm] = grown
        self._pseudo[arm] = ceil_scaled(self.a, s)

    def update(self, arm: int, reward: float) -> None:
        if not 0 <= arm < self.num_arms:
            raise IndexError(f"arm {arm} out of range")
        _validate_reward(reward)
        # append before the count moves so history() stays consistent
        s = int(self.pulls[arm])
        if s == self._buffers[arm].size:
            grown = np.empty(2 * s)
            grown[:s] = self._buffers[arm]
            self._buffers[arm] = grown
        self._buffers[arm][s] = reward
        super().update(arm, reward)

    def indices(self, t: int) -> np.ndarray:
        out = np.full(self.num_arms, np.inf)
        pulled = np.flatnonzero(self.pulls > 0)
        if pulled.size == 0:
            return out
        if self.exact_multinomial:
            for arm in pulled:
                out[arm] = giro_estimate(
                    self.history(int(arm)), self.a, self.stream, exact_multinomial=True
                )
            return out
        sizes = self.pulls[pulled]
        cs = self._pseudo[pulled]
        ms = sizes + 2 * cs
        rep_m = np.repeat(ms, ms)
        u = self.stream.random(rep_m.size)
        idx = (u * rep_m).astype(np.int64)
        rep_c = np.repeat(cs, ms)
        is_one = idx < rep_c
        is_real = idx >= 2 * rep_c
        packed = np.concatenate([self._buffers[a][:n] for a, n in zip(pulled, sizes)])
        pack_base = np.concatenate(([0], np.cumsum(sizes)[:-1])) - 2 * cs
        pos = np.where(is_real, idx + np.repeat(pack_base, ms), 0)
        vals = packed[pos] * is_real + is_one
        seg_starts = np.concatenate(([0], np.cumsum(ms)[:-1]))
        out[pulled] = np.add.reduceat(vals, seg_starts) / ms
        return out


class FplPolicy(Policy):
    """Follow-the-perturbed-leader over cumulative loss estimates.

    Selection maximizes Z_i - eta_t * L_i with fresh Exponential(1) noise;
    losses are estimated by geometric resampling (redraw the perturbed
    leader until the played arm recurs, counting draws, capped).
    """

    def __init__(
        self,
        num_arms: int,
        stream: np.random.Generator,
        learning_rate_scale: float = 1.0,
        resample_cap: Optional[int] = None,
    ):
        super().__init__(num_arms, stream)
        if not learning_rate_scale > 0.0:
            raise ValueError("learning_rate_scale must be positive")
        if resample_cap is not None and resample_cap < 1:
            raise ValueError("resample_cap must be >= 1")
        self.learning_rate_scale = float(learning_rate_scale)
        self.resample_cap = resample_cap
        self.loss_estimates = np.zeros(num_arms)
        self._last_eta = fpl_learning_rate(num_arms, 1, learning_rate_scale)

    def indices(self, t: int) -> np.ndarray:
        self._last_eta = fpl_learning_rate(self.num_arms, t, self.learning_rate_scale)
        noise = self.stream.exponential(1.0, self.num_arms)
        idx = noise - self._last_eta * self.loss_estimates
        return np.where(self.pulls > 0, idx, np.inf)

    def _round_cap(self) -> int:
        if self.resample_cap is not None:
            return self.resample_cap
        if self._last_eta <= 0.0:  # K = 1: leader recurs immediately anyway
            return FPL_CAP_LIMIT
        return min(FPL_CAP_LIMIT, math.ceil(self.num_arms / self._last_eta))

    def _geometric_resample(self, arm: int) -> int:
        """Draws of the perturbed leader until ``arm`` recurs, capped.

        Unpulled arms dominate through a large finite offset; among them the
        fresh noise breaks ties uniformly, matching the sentinel selection
        law exactly.
        """
        base = np.where(self.pulls > 0, -self._last_eta * self.loss_estimates, 1e12)
        cap = self._round_cap()
        drawn = 0
        while drawn < cap:
            block = min(64, cap - drawn)
            noise = self.stream.exponential(1.0, (block, self.num_arms))
            winners = np.argmax(noise + base, axis=1)
            hits = np.flatnonzero(winners == arm)
            if hits.size:
                return drawn + int(hits[0]) + 1
            drawn += block
        return cap

    def update(self, arm: int, reward: float) -> None:
        if not 0 <= arm < self.num_arms:
            raise IndexError(f"arm {arm} out of range")
        _validate_reward(reward)
        # resample against the pre-update state the arm was selected under
        g = self._geometric_resample(arm)
        super().update(arm, reward)
        self.loss_estimates[arm] += (1.0 - reward) * g


# ---------------------------------------------------------------- policy specs


@dataclass(frozen=True)
class PheSpec:
    a: float

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise ValueError(f"a must be positive, got {self.a!r}")


@dataclass(frozen=True)
class Ucb1Spec:
    pass


@dataclass(frozen=True)
class KlUcbSpec:
    tol: float = KLUCB_TOL
    max_iter: int = KLUCB_MAX_ITER

    def __post_init__(self) -> None:
        if not self.tol > 0.0 or self.max_iter < 1:
            raise ValueError("need tol > 0 and max_iter >= 1")


@dataclass(frozen=True)
class ThompsonSpec:
    pass


@dataclass(frozen=True)
class GiroSpec:
    a: float = 1.0
    exact_multinomial: bool = False

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise ValueError(f"a must be positive, got {self.a!r}")


@dataclass(frozen=True)
class FplSpec:
    learning_rate_scale: float = 1.0
    resample_cap: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.learning_rate_scale > 0.0:
            raise ValueError("learning_rate_scale must be positive")
        if self.resample_cap is not None and self.resample_cap < 1:
            raise ValueError("resample_cap must be >= 1")


PolicySpec = Union[PheSpec, Ucb1Spec, KlUcbSpec, ThompsonSpec, GiroSpec, FplSpec]

SPEC_TYPES = (PheSpec, Ucb1Spec, KlUcbSpec, ThompsonSpec, GiroSpec, FplSpec)


def make_policy(spec: PolicySpec, num_arms: int, stream: np.random.Generator) -> Policy:
    """Instantiate the policy a spec describes, bound to one stream."""
    if isinstance(spec, PheSpec):
        return PhePolicy(num_arms, stream, spec.a)
    if isinstance(spec, Ucb1Spec):
        return Ucb1Policy(num_arms, stream)
    if isinstance(spec, KlUcbSpec):
        return KlUcbPolicy(num_arms, stream, spec.tol, spec.max_iter)
    if isinstance(spec, ThompsonSpec):
        return ThompsonPolicy(num_arms, stream)
    if isinstance(spec, GiroSpec):
        return GiroPolicy(num_arms, stream, spec.a, spec.exact_multinomial)
    if isinstance(spec, FplSpec):
        return FplPolicy(num_arms, stream, spec.learning_rate_scale, spec.resample_cap)
    raise TypeError(f"unknown policy spec {spec!r}")
