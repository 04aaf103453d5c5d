"""Deterministic random streams and exact binomial tail sums.

Every random draw in the library flows through a ``numpy.random.Generator``
obtained from :func:`derive_stream`, so experiments are reproducible from a
single master seed plus integer coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import betainc, gammaln

__all__ = [
    "SeedSpec",
    "BinomialParams",
    "BetaParams",
    "derive_stream",
    "sample_binomial",
    "sample_beta",
    "binomial_pmf",
    "binomial_tail",
    "binomial_cdf",
]

# Up to this many trials, tails are summed term by term with exact integer
# binomial coefficients; above it the regularized incomplete beta takes over.
_EXACT_SUM_TRIALS = 1000


def _check_index(name: str, value: int) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value < 0:
        raise ValueError(f"{name} must be nonnegative, got {value}")


@dataclass(frozen=True)
class SeedSpec:
    """Coordinates of one random stream.

    ``run_index`` separates streams that share a problem (by convention the
    simulator uses 0 for instance generation and 1 + j for the j-th policy).
    ``round_index`` is an optional extra level for callers that want a fresh
    stream per round.
    """

    master_seed: int
    problem_index: int = 0
    run_index: int = 0
    round_index: Optional[int] = None

    def __post_init__(self) -> None:
        _check_index("master_seed", self.master_seed)
        _check_index("problem_index", self.problem_index)
        _check_index("run_index", self.run_index)
        if self.round_index is not None:
            _check_index("round_index", self.round_index)


def derive_stream(spec: SeedSpec) -> np.random.Generator:
    """Return an independent counter-based stream for ``spec``.

    The coordinate tuple is hash-mixed by ``SeedSequence`` into a Philox key,
    so distinct tuples give statistically independent streams and the same
    tuple always reproduces the same draw sequence.
    """
    key = (spec.problem_index, spec.run_index)
    if spec.round_index is not None:
        key = key + (spec.round_index,)
    seq = np.random.SeedSequence(entropy=spec.master_seed, spawn_key=key)
    return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class BinomialParams:
    trials: int
    p: float

    def __post_init__(self) -> None:
        _check_index("trials", self.trials)
        if not 0.0 <= self.p <= 1.0 or math.isnan(self.p):
            raise ValueError(f"p must lie in [0, 1], got {self.p!r}")


@dataclass(frozen=True)
class BetaParams:
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0.0 and self.beta > 0.0):
            raise ValueError(
                f"alpha and beta must be positive, got ({self.alpha!r}, {self.beta!r})"
            )


def sample_binomial(params: BinomialParams, stream: np.random.Generator) -> int:
    """One draw of Binomial(trials, p).

    numpy's generator already switches between inversion (small mean) and a
    rejection sampler, so the expected cost is O(1) in ``trials``.
    """
    return int(stream.binomial(params.trials, params.p))


def sample_beta(params: BetaParams, stream: np.random.Generator) -> float:
    """One draw of Beta(alpha, beta)."""
    return float(stream.beta(params.alpha, params.beta))


def _validate_tail_args(threshold: int, trials: int, p: float) -> None:
    if isinstance(threshold, bool) or not isinstance(threshold, (int, np.integer)):
        raise ValueError(f"threshold must be an integer, got {threshold!r}")
    _check_index("trials", trials)
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"p must lie in [0, 1], got {p!r}")


def binomial_pmf(k: int, trials: int, p: float) -> float:
    """P(X = k) for X ~ Binomial(trials, p)."""
    _validate_tail_args(k, trials, p)
    if k < 0 or k > trials:
        return 0.0
    if p == 0.0:
        return 1.0 if k == 0 else 0.0
    if p == 1.0:
        return 1.0 if k == trials else 0.0
    if trials <= _EXACT_SUM_TRIALS:
        return math.comb(trials, int(k)) * p ** int(k) * (1.0 - p) ** int(trials - k)
    log_term = (
        gammaln(trials + 1.0)
        - gammaln(k + 1.0)
        - gammaln(trials - k + 1.0)
        + k * math.log(p)
        + (trials - k) * math.log1p(-p)
    )
    return float(math.exp(log_term))


def _sum_range(lo: int, hi: int, trials: int, p: float) -> float:
    """Sum of P(X = y) over y in [lo, hi]; exact coefficients, fsum order."""
    if lo > hi:
        return 0.0
    q = 1.0 - p
    return math.fsum(
        math.comb(trials, y) * p**y * q ** (trials - y) for y in range(lo, hi + 1)
    )


def binomial_tail(threshold: int, trials: int, p: float) -> float:
    """Exact upper tail P(X >= threshold) for X ~ Binomial(trials, p).

    Small cases sum exact integer-coefficient terms over whichever tail
    carries less mass, so tiny probabilities are never produced by
    cancellation against 1; large cases use the identity
    P(X >= k) = I_p(k, trials - k + 1) with the regularized incomplete beta,
    which holds full relative precision out to 10^6 trials.  Degenerate
    thresholds short-circuit: <= 0 gives 1, above ``trials`` gives 0.
    """
    _validate_tail_args(threshold, trials, p)
    if threshold <= 0:
        return 1.0
    if threshold > trials:
        return 0.0
    if p == 0.0:
        return 0.0  # threshold >= 1 here
    if p == 1.0:
        return 1.0  # threshold <= trials here
    k = int(threshold)
    if trials > _EXACT_SUM_TRIALS:
        return float(betainc(k, trials - k + 1, p))
    if k > trials * p:
        return min(1.0, _sum_range(k, trials, trials, p))
    return min(1.0, max(0.0, 1.0 - _sum_range(0, k - 1, trials, p)))


def binomial_cdf(k: int, trials: int, p: float) -> float:
    """P(X <= k), evaluated through the mirrored upper tail.

    Uses P(X <= k) = P(trials - X >= trials - k) with trials - X
    ~ Binomial(trials, 1 - p), so both tails share one summation routine.
    """
    _validate_tail_args(k, trials, p)
    if k < 0:
        return 0.0
    if k >= trials:
        return 1.0
    return binomial_tail(trials - int(k), trials, 1.0 - p)
