"""Experiment, verification, and benchmark configs parsed from YAML.

The parser walks the YAML node tree (``yaml.compose``) instead of using
``yaml.safe_load`` so every validation error can point at the line of the
offending value, not just syntax errors.  ``serialize_experiment_config``
inverts ``parse_experiment_config`` up to formatting: parsing the serialized
text yields an equal config.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import yaml

from .envs import (
    BernoulliFamily,
    BetaFamily,
    ProblemGenSpec,
    RescaledFamily,
    RewardFamily,
)
from .policies import (
    FplSpec,
    GiroSpec,
    KlUcbSpec,
    PheSpec,
    PolicySpec,
    ThompsonSpec,
    Ucb1Spec,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "VerifyConfig",
    "BenchConfig",
    "parse_experiment_config",
    "parse_verify_config",
    "parse_bench_config",
    "load_experiment_config",
    "load_verify_config",
    "load_bench_config",
    "serialize_experiment_config",
    "DEFAULT_VERIFY_CHECKS",
    "DEFAULT_BENCH_POLICIES",
]


class ConfigError(ValueError):
    """Config problem with a source location (``file:line: message``)."""

    def __init__(self, source: str, line: Optional[int], message: str):
        self.source = source
        self.line = line
        self.short_message = message
        where = source if line is None else f"{source}:{line}"
        super().__init__(f"{where}: {message}")


# ---------------------------------------------------------------------------
# YAML node walking


def _line(node: yaml.Node) -> int:
    return node.start_mark.line + 1


class _Mapping:
    """A mapping node with checked, line-anchored field access."""

    def __init__(self, node: yaml.Node, source: str, what: str):
        if not isinstance(node, yaml.MappingNode):
            raise ConfigError(source, _line(node), f"{what} must be a mapping")
        self.node = node
        self.source = source
        self.what = what
        self.fields: Dict[str, yaml.Node] = {}
        self.key_lines: Dict[str, int] = {}
        for key_node, value_node in node.value:
            if not isinstance(key_node, yaml.ScalarNode):
                raise ConfigError(source, _line(key_node), "mapping keys must be plain scalars")
            key = str(key_node.value)
            if key in self.fields:
                raise ConfigError(source, _line(key_node), f"duplicate key {key!r}")
            self.fields[key] = value_node
            self.key_lines[key] = _line(key_node)
        self._unread = set(self.fields)

    def take(self, key: str) -> Optional[yaml.Node]:
        self._unread.discard(key)
        return self.fields.get(key)

    def require(self, key: str) -> yaml.Node:
        node = self.take(key)
        if node is None:
            raise ConfigError(
                self.source, _line(self.node), f"{self.what} is missing required key {key!r}"
            )
        return node

    def finish(self) -> None:
        if self._unread:
            key = sorted(self._unread)[0]
            raise ConfigError(
                self.source, self.key_lines[key], f"{self.what} has unknown key {key!r}"
            )


def _scalar(node: yaml.Node, source: str, what: str) -> str:
    if not isinstance(node, yaml.ScalarNode):
        raise ConfigError(source, _line(node), f"{what} must be a scalar")
    return str(node.value)


def _as_str(node: yaml.Node, source: str, what: str) -> str:
    value = _scalar(node, source, what)
    if not value:
        raise ConfigError(source, _line(node), f"{what} must be a non-empty string")
    return value


def _as_int(node: yaml.Node, source: str, what: str) -> int:
    text = _scalar(node, source, what)
    try:
        return int(text)
    except ValueError:
        raise ConfigError(source, _line(node), f"{what} must be an integer, got {text!r}") from None


def _as_float(node: yaml.Node, source: str, what: str) -> float:
    text = _scalar(node, source, what)
    try:
        return float(text)
    except ValueError:
        raise ConfigError(source, _line(node), f"{what} must be a number, got {text!r}") from None


def _as_bool(node: yaml.Node, source: str, what: str) -> bool:
    text = _scalar(node, source, what).lower()
    if text in ("true", "yes", "on"):
        return True
    if text in ("false", "no", "off"):
        return False
    raise ConfigError(source, _line(node), f"{what} must be true or false, got {text!r}")


def _as_sequence(node: yaml.Node, source: str, what: str) -> Sequence[yaml.Node]:
    if not isinstance(node, yaml.SequenceNode):
        raise ConfigError(source, _line(node), f"{what} must be a list")
    return node.value


def _compose(text: str, source: str) -> yaml.Node:
    try:
        node = yaml.compose(text)
    except yaml.YAMLError as exc:
        line = None
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            line = mark.line + 1
        raise ConfigError(source, line, f"invalid YAML: {exc}") from None
    if node is None:
        raise ConfigError(source, None, "config is empty")
    return node


# ---------------------------------------------------------------------------
# Environments and policies


def _parse_environment(node: yaml.Node, source: str) -> RewardFamily:
    env = _Mapping(node, source, "environment")
    kind = _as_str(env.require("kind"), source, "environment kind").lower()
    try:
        if kind == "bernoulli":
            family: RewardFamily = BernoulliFamily()
        elif kind == "beta":
            conc = env.take("concentration")
            family = BetaFamily(
                concentration=_as_float(conc, source, "concentration") if conc else 4.0
            )
        elif kind == "rescaled":
            family = RescaledFamily(
                low=_as_float(env.require("low"), source, "low reward"),
                high=_as_float(env.require("high"), source, "high reward"),
            )
        else:
            raise ConfigError(
                source,
                _line(node),
                f"unknown environment kind {kind!r} (expected bernoulli, beta, or rescaled)",
            )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(source, _line(node), str(exc)) from None
    env.finish()
    return family


def _parse_policy(node: yaml.Node, source: str) -> Tuple[str, PolicySpec]:
    policy = _Mapping(node, source, "policy")
    label = _as_str(policy.require("label"), source, "policy label")
    kind = _as_str(policy.require("kind"), source, "policy kind").lower()
    try:
        if kind == "phe":
            spec: PolicySpec = PheSpec(a=_as_float(policy.require("a"), source, "a"))
        elif kind == "ucb1":
            spec = Ucb1Spec()
        elif kind == "klucb":
            tol = policy.take("tol")
            max_iter = policy.take("max_iter")
            kwargs = {}
            if tol is not None:
                kwargs["tol"] = _as_float(tol, source, "tol")
            if max_iter is not None:
                kwargs["max_iter"] = _as_int(max_iter, source, "max_iter")
            spec = KlUcbSpec(**kwargs)
        elif kind == "thompson":
            spec = ThompsonSpec()
        elif kind == "giro":
            a = policy.take("a")
            exact = policy.take("exact_multinomial")
            spec = GiroSpec(
                a=_as_float(a, source, "a") if a else 1.0,
                exact_multinomial=(
                    _as_bool(exact, source, "exact_multinomial") if exact else False
                ),
            )
        elif kind == "fpl":
            scale = policy.take("learning_rate_scale")
            cap = policy.take("resample_cap")
            spec = FplSpec(
                learning_rate_scale=(
                    _as_float(scale, source, "learning_rate_scale") if scale else 1.0
                ),
                resample_cap=_as_int(cap, source, "resample_cap") if cap else None,
            )
        else:
            raise ConfigError(
                source,
                _line(node),
                f"unknown policy kind {kind!r} "
                "(expected phe, ucb1, klucb, thompson, giro, or fpl)",
            )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(source, _line(node), str(exc)) from None
    policy.finish()
    return label, spec


def _parse_policy_list(
    node: yaml.Node, source: str
) -> Tuple[Tuple[str, PolicySpec], ...]:
    items = _as_sequence(node, source, "policies")
    if not items:
        raise ConfigError(source, _line(node), "policies must list at least one policy")
    policies = []
    seen = {}
    for item in items:
        label, spec = _parse_policy(item, source)
        if label in seen:
            raise ConfigError(
                source,
                _line(item),
                f"duplicate policy label {label!r} (first used on line {seen[label]})",
            )
        seen[label] = _line(item)
        policies.append((label, spec))
    return tuple(policies)


_POLICY_KINDS = {
    PheSpec: "phe",
    Ucb1Spec: "ucb1",
    KlUcbSpec: "klucb",
    ThompsonSpec: "thompson",
    GiroSpec: "giro",
    FplSpec: "fpl",
}


def _policy_to_dict(label: str, spec: PolicySpec) -> Dict[str, object]:
    out: Dict[str, object] = {"label": label, "kind": _POLICY_KINDS[type(spec)]}
    if isinstance(spec, PheSpec):
        out["a"] = spec.a
    elif isinstance(spec, KlUcbSpec):
        out["tol"] = spec.tol
        out["max_iter"] = spec.max_iter
    elif isinstance(spec, GiroSpec):
        out["a"] = spec.a
        out["exact_multinomial"] = spec.exact_multinomial
    elif isinstance(spec, FplSpec):
        out["learning_rate_scale"] = spec.learning_rate_scale
        if spec.resample_cap is not None:
            out["resample_cap"] = spec.resample_cap
    return out


def _environment_to_dict(family: RewardFamily) -> Dict[str, object]:
    if isinstance(family, BernoulliFamily):
        return {"kind": "bernoulli"}
    if isinstance(family, BetaFamily):
        return {"kind": "beta", "concentration": family.concentration}
    return {"kind": "rescaled", "low": family.low, "high": family.high}


# ---------------------------------------------------------------------------
# Experiment config


@dataclass(frozen=True)
class ExperimentConfig:
    """One regret experiment: an instance recipe plus the policies to race."""

    name: str
    family: RewardFamily
    num_arms: int
    num_rounds: int
    num_problems: int
    master_seed: int
    workers: int
    mean_low: float
    mean_high: float
    policies: Tuple[Tuple[str, PolicySpec], ...]

    def problem_spec(self) -> ProblemGenSpec:
        return ProblemGenSpec(
            num_arms=self.num_arms,
            mean_low=self.mean_low,
            mean_high=self.mean_high,
            family=self.family,
        )

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(label for label, _ in self.policies)

    @property
    def specs(self) -> Tuple[PolicySpec, ...]:
        return tuple(spec for _, spec in self.policies)


def parse_experiment_config(text: str, source: str = "<config>") -> ExperimentConfig:
    root = _Mapping(_compose(text, source), source, "config")
    name = _as_str(root.require("name"), source, "name")
    family = _parse_environment(root.require("environment"), source)

    num_arms_node = root.require("num_arms")
    num_arms = _as_int(num_arms_node, source, "num_arms")
    num_rounds = _as_int(root.require("num_rounds"), source, "num_rounds")
    num_problems = _as_int(root.require("num_problems"), source, "num_problems")
    seed_node = root.require("master_seed")
    master_seed = _as_int(seed_node, source, "master_seed")
    workers_node = root.take("workers")
    workers = _as_int(workers_node, source, "workers") if workers_node else 1

    mean_low, mean_high = 0.25, 0.75
    interval_node = root.take("mean_interval")
    if interval_node is not None:
        pair = _as_sequence(interval_node, source, "mean_interval")
        if len(pair) != 2:
            raise ConfigError(
                source, _line(interval_node), "mean_interval must be [low, high]"
            )
        mean_low = _as_float(pair[0], source, "mean_interval low")
        mean_high = _as_float(pair[1], source, "mean_interval high")

    policies = _parse_policy_list(root.require("policies"), source)
    root.finish()

    if num_rounds < 1:
        raise ConfigError(source, root.key_lines["num_rounds"], "num_rounds must be >= 1")
    if num_problems < 1:
        raise ConfigError(
            source, root.key_lines["num_problems"], "num_problems must be >= 1"
        )
    if workers < 1:
        raise ConfigError(source, root.key_lines["workers"], "workers must be >= 1")
    if not 0 <= master_seed < 2**64:
        raise ConfigError(
            source, _line(seed_node), "master_seed must fit in an unsigned 64-bit value"
        )

    config = ExperimentConfig(
        name=name,
        family=family,
        num_arms=num_arms,
        num_rounds=num_rounds,
        num_problems=num_problems,
        master_seed=master_seed,
        workers=workers,
        mean_low=mean_low,
        mean_high=mean_high,
        policies=policies,
    )
    try:
        config.problem_spec()  # delegate instance-recipe validation
    except ValueError as exc:
        anchor = (
            root.key_lines.get("mean_interval")
            or root.key_lines.get("environment")
            or _line(num_arms_node)
        )
        raise ConfigError(source, anchor, str(exc)) from None
    return config


def serialize_experiment_config(config: ExperimentConfig) -> str:
    data = {
        "name": config.name,
        "environment": _environment_to_dict(config.family),
        "num_arms": config.num_arms,
        "num_rounds": config.num_rounds,
        "num_problems": config.num_problems,
        "master_seed": config.master_seed,
        "workers": config.workers,
        "mean_interval": [config.mean_low, config.mean_high],
        "policies": [_policy_to_dict(label, spec) for label, spec in config.policies],
    }
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=False)


def load_experiment_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_experiment_config(handle.read(), source=path)


# ---------------------------------------------------------------------------
# Verification config

DEFAULT_VERIFY_CHECKS = (
    "consistency",
    "theorem4",
    "theorem4_monotone",
    "lemma2",
    "lemma3",
    "hoeffding",
    "tail_optimism",
)


@dataclass(frozen=True)
class VerifyConfig:
    """Which verification grids to run and on which scale values."""

    name: str = "default"
    checks: Tuple[str, ...] = DEFAULT_VERIFY_CHECKS
    theorem4_scales: Tuple[float, ...] = (1.5, 2.0, 3.0, 6.0)
    constant_scales: Tuple[float, ...] = (2.5, 3.0, 4.2, 6.0, 10.0, 20.0)


def parse_verify_config(text: str, source: str = "<config>") -> VerifyConfig:
    root = _Mapping(_compose(text, source), source, "config")
    name_node = root.take("name")
    name = _as_str(name_node, source, "name") if name_node else "default"

    checks = DEFAULT_VERIFY_CHECKS
    checks_node = root.take("checks")
    if checks_node is not None:
        if isinstance(checks_node, yaml.ScalarNode) and checks_node.value == "all":
            checks = DEFAULT_VERIFY_CHECKS
        else:
            items = _as_sequence(checks_node, source, "checks")
            if not items:
                raise ConfigError(source, _line(checks_node), "checks must not be empty")
            parsed = []
            for item in items:
                check = _as_str(item, source, "check name")
                if check not in DEFAULT_VERIFY_CHECKS:
                    raise ConfigError(
                        source,
                        _line(item),
                        f"unknown check {check!r} "
                        f"(expected one of {', '.join(DEFAULT_VERIFY_CHECKS)})",
                    )
                parsed.append(check)
            checks = tuple(parsed)

    theorem4_scales = (1.5, 2.0, 3.0, 6.0)
    scales_node = root.take("theorem4_scales")
    if scales_node is not None:
        items = _as_sequence(scales_node, source, "theorem4_scales")
        if not items:
            raise ConfigError(source, _line(scales_node), "theorem4_scales must not be empty")
        theorem4_scales = tuple(_as_float(i, source, "theorem4 scale") for i in items)

    constant_scales = (2.5, 3.0, 4.2, 6.0, 10.0, 20.0)
    const_node = root.take("constant_scales")
    if const_node is not None:
        items = _as_sequence(const_node, source, "constant_scales")
        if not items:
            raise ConfigError(source, _line(const_node), "constant_scales must not be empty")
        constant_scales = tuple(_as_float(i, source, "constant scale") for i in items)

    root.finish()
    return VerifyConfig(
        name=name,
        checks=checks,
        theorem4_scales=theorem4_scales,
        constant_scales=constant_scales,
    )


def load_verify_config(path: str) -> VerifyConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_verify_config(handle.read(), source=path)


# ---------------------------------------------------------------------------
# Benchmark config

DEFAULT_BENCH_POLICIES: Tuple[Tuple[str, PolicySpec], ...] = (
    ("TS", ThompsonSpec()),
    ("PHE(1.1)", PheSpec(a=1.1)),
    ("Giro(1)", GiroSpec(a=1.0)),
)


@dataclass(frozen=True)
class BenchConfig:
    """Wall-clock benchmark grid: policies crossed with (K, n) points."""

    name: str = "timing"
    k_values: Tuple[int, ...] = (5, 10, 20)
    n_values: Tuple[int, ...] = (1000, 10000)
    repeats: int = 3
    master_seed: int = 0
    policies: Tuple[Tuple[str, PolicySpec], ...] = DEFAULT_BENCH_POLICIES


def parse_bench_config(text: str, source: str = "<config>") -> BenchConfig:
    root = _Mapping(_compose(text, source), source, "config")
    name_node = root.take("name")
    name = _as_str(name_node, source, "name") if name_node else "timing"

    k_values = (5, 10, 20)
    k_node = root.take("k_values")
    if k_node is not None:
        items = _as_sequence(k_node, source, "k_values")
        if not items:
            raise ConfigError(source, _line(k_node), "k_values must not be empty")
        k_values = tuple(_as_int(i, source, "arm count") for i in items)
        if any(k < 1 for k in k_values):
            raise ConfigError(source, _line(k_node), "arm counts must be >= 1")

    n_values = (1000, 10000)
    n_node = root.take("n_values")
    if n_node is not None:
        items = _as_sequence(n_node, source, "n_values")
        if not items:
            raise ConfigError(source, _line(n_node), "n_values must not be empty")
        n_values = tuple(_as_int(i, source, "round count") for i in items)
        if any(n < 10 for n in n_values):
            raise ConfigError(source, _line(n_node), "round counts must be >= 10")

    repeats_node = root.take("repeats")
    repeats = _as_int(repeats_node, source, "repeats") if repeats_node else 3
    if repeats < 1:
        raise ConfigError(source, _line(repeats_node), "repeats must be >= 1")

    seed_node = root.take("master_seed")
    master_seed = _as_int(seed_node, source, "master_seed") if seed_node else 0

    policies = DEFAULT_BENCH_POLICIES
    policies_node = root.take("policies")
    if policies_node is not None:
        policies = _parse_policy_list(policies_node, source)

    root.finish()
    return BenchConfig(
        name=name,
        k_values=k_values,
        n_values=n_values,
        repeats=repeats,
        master_seed=master_seed,
        policies=policies,
    )


def load_bench_config(path: str) -> BenchConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_bench_config(handle.read(), source=path)
