"""Command-line front end: run regret experiments, verify bounds, time policies.

Exit codes: 0 success, 1 runtime failure (I/O, failed mandatory check),
2 config error.  All CSV output is UTF-8 with a header row, ``.`` decimal
separator, LF line endings, and 1-based round indices.  Result CSVs are a
pure function of (config, master seed); worker counts change wall time only.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import math
import os
import re
import sys
from typing import Iterable, List, Optional, Sequence, Tuple

from . import __version__, theory
from .config import (
    BenchConfig,
    ConfigError,
    VerifyConfig,
    load_bench_config,
    load_experiment_config,
    load_verify_config,
    serialize_experiment_config,
)
from .simulate import run_experiment, time_policies
from .svgplot import Series, render_line_chart
from .theory import TheoryCheckReport

__all__ = ["main", "entrypoint", "cmd_run", "cmd_verify", "cmd_bench"]


# ---------------------------------------------------------------------------
# small output helpers


def _fmt(value: float) -> str:
    """Shortest round-trip decimal form (repr), so rereading is lossless."""
    return repr(float(value))


def _write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _slugify(label: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", label.lower()).strip("-")
    return slug or "policy"


def _unique_slugs(labels: Sequence[str]) -> List[str]:
    taken = set()
    slugs = []
    for label in labels:
        slug = _slugify(label)
        candidate, counter = slug, 2
        while candidate in taken:
            candidate = f"{slug}-{counter}"
            counter += 1
        taken.add(candidate)
        slugs.append(candidate)
    return slugs


# ---------------------------------------------------------------------------
# run


def cmd_run(
    config_path: str,
    out_dir: str,
    workers: Optional[int] = None,
    seed: Optional[int] = None,
) -> int:
    config = load_experiment_config(config_path)
    if workers is not None:
        config = dataclasses.replace(config, workers=workers)
    if seed is not None:
        config = dataclasses.replace(config, master_seed=seed)
    os.makedirs(out_dir, exist_ok=True)

    results = run_experiment(
        config.problem_spec(),
        list(config.specs),
        num_rounds=config.num_rounds,
        num_problems=config.num_problems,
        master_seed=config.master_seed,
        workers=config.workers,
    )

    labels = list(config.labels)
    slugs = _unique_slugs(labels)
    for label, slug, result in zip(labels, slugs, results):
        rows = (
            (t + 1, _fmt(result.mean_curve[t]), _fmt(result.stderr_curve[t]))
            for t in range(config.num_rounds)
        )
        _write_csv(
            os.path.join(out_dir, f"regret_{slug}.csv"),
            ("round", "mean_regret", "stderr"),
            rows,
        )

    _write_csv(
        os.path.join(out_dir, "summary.csv"),
        ("policy", "final_regret", "final_stderr"),
        (
            (label, _fmt(result.final_regret), _fmt(result.final_stderr))
            for label, result in zip(labels, results)
        ),
    )

    with open(config_path, "rb") as handle:
        config_sha256 = hashlib.sha256(handle.read()).hexdigest()
    # canonical form pins everything that affects the numbers; worker count
    # does not, so it is normalized out
    canonical = serialize_experiment_config(dataclasses.replace(config, workers=1))
    manifest = {
        "name": config.name,
        "config_sha256": config_sha256,
        "master_seed": config.master_seed,
        "package": "phebandit",
        "version": __version__,
        "canonical_config": canonical,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")

    chart = render_line_chart(
        [
            Series(label, range(1, config.num_rounds + 1), result.mean_curve)
            for label, result in zip(labels, results)
        ],
        title=config.name,
        x_label="round",
        y_label="mean cumulative regret",
    )
    with open(os.path.join(out_dir, "regret.svg"), "w", encoding="utf-8") as handle:
        handle.write(chart)

    for label, result in zip(labels, results):
        print(f"{label}: final regret {result.final_regret:.2f} (+/- {result.final_stderr:.2f})")
    print(f"wrote {len(labels)} regret curves, summary, manifest, and plot to {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# verify


def _domain_error_report(check: str, params: str, message: str) -> TheoryCheckReport:
    return TheoryCheckReport(
        check=f"{check}_domain_error",
        params=f"{params} error={message}",
        lhs=math.nan,
        rhs=math.nan,
        margin=math.nan,
        passed=False,
        mandatory=True,
    )


def _collect_verify_reports(config: VerifyConfig) -> List[TheoryCheckReport]:
    reports: List[TheoryCheckReport] = []
    for check in config.checks:
        if check == "consistency":
            for a in config.constant_scales:
                try:
                    reports.extend(theory.run_consistency_checks(a_values=(a,)))
                except ValueError as exc:
                    reports.append(_domain_error_report("consistency", f"a={_fmt(a)}", str(exc)))
        elif check == "theorem4":
            for a in config.theorem4_scales:
                try:
                    reports.extend(theory.run_theorem4_grid(a_values=(a,)))
                except ValueError as exc:
                    reports.append(_domain_error_report("theorem4", f"a={_fmt(a)}", str(exc)))
        elif check == "theorem4_monotone":
            reports.extend(theory.run_theorem4_monotone())
        elif check == "lemma2":
            reports.extend(theory.run_lemma2_suite())
        elif check == "lemma3":
            reports.extend(theory.run_lemma3_grid())
        elif check == "hoeffding":
            reports.extend(theory.run_hoeffding_grid())
        elif check == "tail_optimism":
            reports.extend(theory.run_tail_optimism_grid())
        else:  # unreachable after config validation
            raise ValueError(f"unknown check {check!r}")
    return reports


def cmd_verify(config_path: Optional[str], out_dir: str) -> int:
    config = load_verify_config(config_path) if config_path else VerifyConfig()
    os.makedirs(out_dir, exist_ok=True)

    reports = _collect_verify_reports(config)
    _write_csv(
        os.path.join(out_dir, "checks.csv"),
        ("check", "params", "lhs", "rhs", "margin", "pass"),
        (
            (
                r.check,
                r.params,
                _fmt(r.lhs),
                _fmt(r.rhs),
                _fmt(r.margin),
                "true" if r.passed else "false",
            )
            for r in reports
        ),
    )

    mandatory_failures = [r for r in reports if r.mandatory and not r.passed]
    advisory = [r for r in reports if not r.mandatory]
    advisory_failed = sum(1 for r in advisory if not r.passed)
    print(
        f"{len(reports)} checks: "
        f"{len(mandatory_failures)} mandatory failures, "
        f"{advisory_failed}/{len(advisory)} advisory rows not satisfied"
    )
    if mandatory_failures:
        worst = mandatory_failures[0]
        print(f"first failure: {worst.check} [{worst.params}]", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# bench


def cmd_bench(config_path: Optional[str], out_dir: str, seed: Optional[int] = None) -> int:
    config = load_bench_config(config_path) if config_path else BenchConfig()
    if seed is not None:
        config = dataclasses.replace(config, master_seed=seed)
    os.makedirs(out_dir, exist_ok=True)

    rows = time_policies(
        list(config.policies),
        k_values=config.k_values,
        n_values=config.n_values,
        repeats=config.repeats,
        master_seed=config.master_seed,
    )
    _write_csv(
        os.path.join(out_dir, "bench.csv"),
        (
            "policy",
            "K",
            "n",
            "total_seconds",
            "first_decile_per_round",
            "last_decile_per_round",
        ),
        (
            (
                row.label,
                row.num_arms,
                row.num_rounds,
                _fmt(row.total_seconds),
                _fmt(row.first_decile_per_round),
                _fmt(row.last_decile_per_round),
            )
            for row in rows
        ),
    )
    points = len(config.k_values) * len(config.n_values)
    noun = "grid point" if points == 1 else "grid points"
    print(f"timed {len(config.policies)} policies on {points} {noun}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _u64(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit value")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phebandit",
        description="Perturbed-history bandit experiments, bound verification, and timing.",
    )
    parser.add_argument("--version", action="version", version=f"phebandit {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_common(sub: argparse.ArgumentParser, config_required: bool) -> None:
        sub.add_argument(
            "--config",
            required=config_required,
            default=None,
            help="YAML config path" + ("" if config_required else " (built-in defaults if omitted)"),
        )
        sub.add_argument("--out", required=True, help="output directory (created if missing)")
        sub.add_argument(
            "--workers",
            type=_positive_int,
            default=None,
            help="parallel worker processes (affects speed only, never results)",
        )
        sub.add_argument(
            "--seed",
            type=_u64,
            default=None,
            help="master seed override (unsigned 64-bit)",
        )

    run_p = subparsers.add_parser("run", help="simulate policies and write regret curves")
    add_common(run_p, config_required=True)

    verify_p = subparsers.add_parser(
        "verify", help="run the bound-verification grids and write a report CSV"
    )
    add_common(verify_p, config_required=False)

    bench_p = subparsers.add_parser("bench", help="wall-clock timing table over a (K, n) grid")
    add_common(bench_p, config_required=False)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args.config, args.out, workers=args.workers, seed=args.seed)
        if args.command == "verify":
            # deterministic and single-threaded: --workers/--seed accepted for
            # interface uniformity but cannot change the output
            return cmd_verify(args.config, args.out)
        if args.command == "bench":
            # timing is intentionally single-threaded; --workers is a no-op
            return cmd_bench(args.config, args.out, seed=args.seed)
        parser.error(f"unknown command {args.command!r}")  # unreachable
        return 2
    except ConfigError as exc:
        print(f"phebandit: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"phebandit: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main(sys.argv[1:]))
