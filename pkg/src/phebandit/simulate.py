"""Regret simulation: episodes, multi-problem experiments, and timing.

Determinism contract: every random decision flows from a SeedSpec-derived
stream.  Problem p draws its instance from (master_seed, p, run 0); the j-th
policy in an experiment plays with the stream (master_seed, p, run 1+j),
which also supplies that episode's rewards.  Aggregation reduces in fixed
problem order, so results are byte-identical for any worker count.
"""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple, Union

import numpy as np

from .envs import BanditInstance, BernoulliFamily, ProblemGenSpec, generate_problem, pull
from .policies import SPEC_TYPES, Policy, PolicySpec, make_policy
from .rng import SeedSpec, derive_stream

__all__ = [
    "EpisodeConfig",
    "RegretCurve",
    "AggregateResult",
    "BenchRow",
    "run_episode",
    "run_experiment",
    "time_policies",
]

PolicyFactory = Callable[[int, np.random.Generator], Policy]


@dataclass(frozen=True)
class EpisodeConfig:
    """One policy, one instance, one seeded stream, ``num_rounds`` rounds."""

    num_rounds: int
    policy: Union[PolicySpec, PolicyFactory]
    instance: BanditInstance
    seed: SeedSpec

    def __post_init__(self) -> None:
        if self.num_rounds < 1:
            raise ValueError(f"num_rounds must be >= 1, got {self.num_rounds!r}")


@dataclass(frozen=True)
class RegretCurve:
    """Per-round cumulative pseudo-regret plus pull counts and block times.

    ``decile_seconds[b]`` is the wall time spent on the b-th tenth of the
    rounds, so per-round cost growth over an episode is visible directly.
    """

    cumulative_regret: np.ndarray
    pull_counts: np.ndarray
    decile_seconds: np.ndarray

    @property
    def final_regret(self) -> float:
        return float(self.cumulative_regret[-1])

    @property
    def total_seconds(self) -> float:
        return float(self.decile_seconds.sum())


@dataclass(frozen=True)
class AggregateResult:
    """Across-problem mean and standard error of one policy's regret curve."""

    mean_curve: np.ndarray
    stderr_curve: np.ndarray
    wall_seconds: float
    num_problems: int

    @property
    def final_regret(self) -> float:
        return float(self.mean_curve[-1])

    @property
    def final_stderr(self) -> float:
        return float(self.stderr_curve[-1])


def _build_policy(
    policy: Union[PolicySpec, PolicyFactory], num_arms: int, stream: np.random.Generator
) -> Policy:
    if isinstance(policy, SPEC_TYPES):
        return make_policy(policy, num_arms, stream)
    if callable(policy):
        return policy(num_arms, stream)
    raise TypeError(f"policy must be a spec or a factory, got {policy!r}")


def run_episode(config: EpisodeConfig) -> RegretCurve:
    """Play ``num_rounds`` select/pull/update cycles and record regret.

    Regret is accumulated with the instance's true gaps (pseudo-regret),
    not realized reward differences.
    """
    stream = derive_stream(config.seed)
    instance = config.instance
    num_arms = instance.num_arms
    n = config.num_rounds
    if n < num_arms:
        warnings.warn(
            f"horizon {n} is shorter than the {num_arms}-arm initialization",
            stacklevel=2,
        )
    policy = _build_policy(config.policy, num_arms, stream)
    gaps = instance.gaps()
    arms = np.empty(n, dtype=np.int64)
    decile_seconds = np.zeros(10)
    bounds = [(b * n) // 10 for b in range(11)]
    t = 1
    for b in range(10):
        started = time.perf_counter()
        for _ in range(bounds[b], bounds[b + 1]):
            arm = policy.select(t)
            reward = pull(instance, arm, stream)
            policy.update(arm, reward)
            arms[t - 1] = arm
            t += 1
        decile_seconds[b] = time.perf_counter() - started
    return RegretCurve(
        cumulative_regret=np.cumsum(gaps[arms]),
        pull_counts=np.bincount(arms, minlength=num_arms),
        decile_seconds=decile_seconds,
    )


def _problem_instance(
    problem: Union[BanditInstance, ProblemGenSpec], master_seed: int, index: int
) -> BanditInstance:
    if isinstance(problem, BanditInstance):
        return problem
    return generate_problem(problem, derive_stream(SeedSpec(master_seed, index, 0)))


def _run_problem(args) -> Tuple[int, np.ndarray, np.ndarray]:
    problem, policies, num_rounds, master_seed, index = args
    instance = _problem_instance(problem, master_seed, index)
    regrets = np.empty((len(policies), num_rounds))
    seconds = np.empty(len(policies))
    for j, spec in enumerate(policies):
        curve = run_episode(
            EpisodeConfig(
                num_rounds=num_rounds,
                policy=spec,
                instance=instance,
                seed=SeedSpec(master_seed, problem_index=index, run_index=1 + j),
            )
        )
        regrets[j] = curve.cumulative_regret
        seconds[j] = curve.total_seconds
    return index, regrets, seconds


def run_experiment(
    problem: Union[BanditInstance, ProblemGenSpec],
    policies: Sequence[Union[PolicySpec, PolicyFactory]],
    num_rounds: int,
    num_problems: int,
    master_seed: int,
    workers: int = 1,
) -> Tuple[AggregateResult, ...]:
    """Run every policy on the same ``num_problems`` instances and aggregate.

    Returns one AggregateResult per policy, in input order.  Worker count
    affects speed only: streams are derived per (problem, policy) and the
    reduction runs in problem order.
    """
    if num_problems < 1:
        raise ValueError(f"num_problems must be >= 1, got {num_problems!r}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers!r}")
    if not policies:
        raise ValueError("need at least one policy")
    tasks = [
        (problem, tuple(policies), num_rounds, master_seed, p) for p in range(num_problems)
    ]
    if workers == 1:
        outputs = [_run_problem(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_run_problem, tasks))
    outputs.sort(key=lambda item: item[0])  # reduce in problem order, always
    all_regrets = np.stack([regrets for _, regrets, _ in outputs], axis=0)
    all_seconds = np.stack([seconds for _, _, seconds in outputs], axis=0)
    results = []
    for j in range(len(policies)):
        curves = all_regrets[:, j, :]
        mean_curve = curves.mean(axis=0)
        if num_problems > 1:
            stderr = curves.std(axis=0, ddof=1) / np.sqrt(num_problems)
        else:
            stderr = np.zeros_like(mean_curve)
        results.append(
            AggregateResult(
                mean_curve=mean_curve,
                stderr_curve=stderr,
                wall_seconds=float(all_seconds[:, j].sum()),
                num_problems=num_problems,
            )
        )
    return tuple(results)


@dataclass(frozen=True)
class BenchRow:
    """Timing of one policy at one (K, n) grid point."""

    label: str
    num_arms: int
    num_rounds: int
    total_seconds: float
    first_decile_per_round: float
    last_decile_per_round: float


def _timing_instance(num_arms: int) -> BanditInstance:
    means = np.linspace(0.25, 0.75, num_arms)
    return BanditInstance(tuple(float(m) for m in means), BernoulliFamily())


def time_policies(
    policies: Sequence[Tuple[str, Union[PolicySpec, PolicyFactory]]],
    k_values: Sequence[int],
    n_values: Sequence[int],
    repeats: int = 3,
    master_seed: int = 0,
) -> Tuple[BenchRow, ...]:
    """Wall-clock table over the (policy, K, n) grid.

    Monotonic clock; one warm-up episode per grid point is discarded;
    ``total_seconds`` sums the ``repeats`` timed episodes; per-round decile
    costs are medians across repeats.
    """
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats!r}")
    rows = []
    grid_index = 0
    for label, spec in policies:
        for num_arms in k_values:
            for num_rounds in n_values:
                if num_rounds < 10:
                    raise ValueError("timing grid needs num_rounds >= 10")
                instance = _timing_instance(num_arms)
                curves = []
                for rep in range(repeats + 1):  # rep 0 is the warm-up
                    curve = run_episode(
                        EpisodeConfig(
                            num_rounds=num_rounds,
                            policy=spec,
                            instance=instance,
                            seed=SeedSpec(master_seed, grid_index, rep),
                        )
                    )
                    if rep > 0:
                        curves.append(curve)
                first_block = num_rounds // 10
                last_block = num_rounds - (9 * num_rounds) // 10
                rows.append(
                    BenchRow(
                        label=label,
                        num_arms=num_arms,
                        num_rounds=num_rounds,
                        total_seconds=float(sum(c.total_seconds for c in curves)),
                        first_decile_per_round=float(
                            np.median([c.decile_seconds[0] for c in curves]) / first_block
                        ),
                        last_decile_per_round=float(
                            np.median([c.decile_seconds[9] for c in curves]) / last_block
                        ),
                    )
                )
                grid_index += 1
    return tuple(rows)
