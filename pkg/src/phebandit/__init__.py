"""Seedable multi-armed bandit experiments around perturbed-history exploration.

The package bundles six pieces: deterministic seeded randomness and exact
binomial arithmetic (``rng``), reward environments (``envs``), the bandit
policies (``policies``), a parallel regret simulator and timing harness
(``simulate``), exact verification of the concentration bounds and regret
constants behind the perturbed-history analysis (``theory``), and a CLI
(``cli``) with ``run`` / ``verify`` / ``bench`` subcommands.
"""

__version__ = "0.1.0"

from .envs import (
    BanditInstance,
    BernoulliFamily,
    BetaFamily,
    ProblemGenSpec,
    RescaledFamily,
    generate_problem,
    pull,
)
from .policies import (
    FplSpec,
    GiroSpec,
    KlUcbSpec,
    PheSpec,
    Policy,
    PolicySpec,
    ThompsonSpec,
    Ucb1Spec,
    make_policy,
)
from .rng import SeedSpec, derive_stream
from .simulate import (
    AggregateResult,
    BenchRow,
    EpisodeConfig,
    RegretCurve,
    run_episode,
    run_experiment,
    time_policies,
)
from .theory import TheoryCheckReport, run_all_checks

__all__ = [
    "__version__",
    "BanditInstance",
    "BernoulliFamily",
    "BetaFamily",
    "ProblemGenSpec",
    "RescaledFamily",
    "generate_problem",
    "pull",
    "FplSpec",
    "GiroSpec",
    "KlUcbSpec",
    "PheSpec",
    "Policy",
    "PolicySpec",
    "ThompsonSpec",
    "Ucb1Spec",
    "make_policy",
    "SeedSpec",
    "derive_stream",
    "AggregateResult",
    "BenchRow",
    "EpisodeConfig",
    "RegretCurve",
    "run_episode",
    "run_experiment",
    "time_policies",
    "TheoryCheckReport",
    "run_all_checks",
]
