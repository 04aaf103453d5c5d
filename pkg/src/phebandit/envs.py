"""Bandit reward environments.

All observed rewards live in [0, 1].  Three families: Bernoulli coin flips,
beta rewards with a fixed concentration, and an affine-rescaled two-point
family that exercises the generic bounded-reward path.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

__all__ = [
    "BernoulliFamily",
    "BetaFamily",
    "RescaledFamily",
    "RewardFamily",
    "BanditInstance",
    "ProblemGenSpec",
    "pull",
    "rescale_reward",
    "generate_problem",
    "instance_to_text",
    "instance_from_text",
]


@dataclass(frozen=True)
class BernoulliFamily:
    """Rewards are 0/1 coin flips with the arm's mean."""


@dataclass(frozen=True)
class BetaFamily:
    """Arm with mean mu draws Beta(c*mu, c*(1-mu)); c is the concentration."""

    concentration: float = 4.0

    def __post_init__(self) -> None:
        if not self.concentration > 0.0:
            raise ValueError(f"concentration must be positive, got {self.concentration!r}")


@dataclass(frozen=True)
class RescaledFamily:
    """Raw rewards on {low, high} (a scaled coin flip), observed rescaled.

    The observed reward is (raw - low) / (high - low), so downstream code
    still sees values in [0, 1] with the arm's nominal mean.
    """

    low: float
    high: float

    def __post_init__(self) -> None:
        if not self.high > self.low:
            raise ValueError(
                f"reward range needs high > low, got [{self.low!r}, {self.high!r}]"
            )


RewardFamily = Union[BernoulliFamily, BetaFamily, RescaledFamily]


def _check_mean(mu: float, family: RewardFamily) -> None:
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"arm mean must lie in [0, 1], got {mu!r}")
    if isinstance(family, BetaFamily) and not 0.0 < mu < 1.0:
        # both beta shape parameters must stay positive
        raise ValueError(f"beta family needs means strictly inside (0, 1), got {mu!r}")


@dataclass(frozen=True)
class BanditInstance:
    """A fixed problem: per-arm means plus the shared reward family."""

    means: Tuple[float, ...]
    family: RewardFamily = BernoulliFamily()

    def __post_init__(self) -> None:
        means = tuple(float(m) for m in self.means)
        if len(means) == 0:
            raise ValueError("an instance needs at least one arm")
        for mu in means:
            _check_mean(mu, self.family)
        object.__setattr__(self, "means", means)

    @property
    def num_arms(self) -> int:
        return len(self.means)

    @property
    def best_mean(self) -> float:
        return max(self.means)

    def gaps(self) -> np.ndarray:
        """Per-arm suboptimality gaps, zero for every best arm."""
        return self.best_mean - np.asarray(self.means, dtype=np.float64)


def rescale_reward(value: float, low: float, high: float) -> float:
    """Affine map from [low, high] onto [0, 1].

    Values that stray outside the declared range are clamped and logged;
    an empty or inverted range is a configuration error.
    """
    if not high > low:
        raise ValueError(f"reward range needs high > low, got [{low!r}, {high!r}]")
    z = (value - low) / (high - low)
    if z < 0.0 or z > 1.0:
        logger.warning(
            "reward %r outside declared range [%r, %r]; clamping", value, low, high
        )
        z = min(1.0, max(0.0, z))
    return z


def pull(instance: BanditInstance, arm: int, stream: np.random.Generator) -> float:
    """Draw one reward for ``arm``; always lands in [0, 1]."""
    if not 0 <= arm < instance.num_arms:
        raise IndexError(f"arm {arm} out of range for {instance.num_arms} arms")
    mu = instance.means[arm]
    family = instance.family
    if isinstance(family, BernoulliFamily):
        return 1.0 if stream.random() < mu else 0.0
    if isinstance(family, BetaFamily):
        c = family.concentration
        return float(stream.beta(c * mu, c * (1.0 - mu)))
    raw = family.low + (family.high - family.low) * (
        1.0 if stream.random() < mu else 0.0
    )
    return rescale_reward(raw, family.low, family.high)


@dataclass(frozen=True)
class ProblemGenSpec:
    """Recipe for random instances: i.i.d. uniform means on [mean_low, mean_high]."""

    num_arms: int
    mean_low: float = 0.25
    mean_high: float = 0.75
    family: RewardFamily = BernoulliFamily()

    def __post_init__(self) -> None:
        if self.num_arms < 1:
            raise ValueError(f"num_arms must be >= 1, got {self.num_arms!r}")
        if not 0.0 <= self.mean_low <= self.mean_high <= 1.0:
            raise ValueError(
                f"need 0 <= mean_low <= mean_high <= 1, got "
                f"[{self.mean_low!r}, {self.mean_high!r}]"
            )
        _check_mean(self.mean_low, self.family)
        _check_mean(self.mean_high, self.family)


def generate_problem(spec: ProblemGenSpec, stream: np.random.Generator) -> BanditInstance:
    """Sample an instance with i.i.d. uniform means from ``stream``."""
    span = spec.mean_high - spec.mean_low
    means = spec.mean_low + span * stream.random(spec.num_arms)
    return BanditInstance(tuple(float(m) for m in means), spec.family)


def _family_header(family: RewardFamily) -> str:
    if isinstance(family, BernoulliFamily):
        return "family bernoulli"
    if isinstance(family, BetaFamily):
        return f"family beta {family.concentration!r}"
    return f"family rescaled {family.low!r} {family.high!r}"


def instance_to_text(instance: BanditInstance) -> str:
    """Plain-text record: one header line, then one arm per line.

    Arm lines carry the mean plus the arm's derived family parameters (beta
    shapes or raw range) for readability; means use repr so the round trip
    is bit-exact.
    """
    lines = [_family_header(instance.family)]
    for mu in instance.means:
        if isinstance(instance.family, BetaFamily):
            c = instance.family.concentration
            lines.append(f"arm {mu!r} {c * mu!r} {c * (1.0 - mu)!r}")
        elif isinstance(instance.family, RescaledFamily):
            lines.append(f"arm {mu!r} {instance.family.low!r} {instance.family.high!r}")
        else:
            lines.append(f"arm {mu!r}")
    return "\n".join(lines) + "\n"


def instance_from_text(text: str) -> BanditInstance:
    """Inverse of :func:`instance_to_text`; ignores blank and '#' lines."""
    family: RewardFamily | None = None
    means = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        try:
            if fields[0] == "family":
                if fields[1] == "bernoulli":
                    family = BernoulliFamily()
                elif fields[1] == "beta":
                    family = BetaFamily(float(fields[2]))
                elif fields[1] == "rescaled":
                    family = RescaledFamily(float(fields[2]), float(fields[3]))
                else:
                    raise ValueError(f"unknown family {fields[1]!r}")
            elif fields[0] == "arm":
                means.append(float(fields[1]))
            else:
                raise ValueError(f"unknown record {fields[0]!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: cannot parse {raw!r} ({exc})") from None
    if family is None or not means:
        raise ValueError("record needs a family line and at least one arm line")
    return BanditInstance(tuple(means), family)
