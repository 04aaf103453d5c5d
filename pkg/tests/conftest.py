"""Shared statistical helpers for the suite.

The distributional tests all follow the same recipe: draw a fixed number of
samples from a seeded stream, compare against an exact reference law, and
require the goodness-of-fit p-value to clear a small significance level.
"""

import numpy as np
import pytest
from scipy import stats as sps

SIGNIFICANCE = 1e-3
N_DIST_SAMPLES = 100_000

# one line per acceptance criterion, echoed after the run so the verdicts
# survive pytest's output capture
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def criterion_report():
    def record(number: int, passed: bool, detail: str) -> None:
        verdict = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES.append(f"[{verdict}] criterion {number:2d}: {detail}")
        assert passed, f"criterion {number} failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def pooled_chi2_pvalue(observed_counts, expected_probs, min_expected=5.0):
    """Chi-squared goodness-of-fit p-value with adjacent-bin pooling.

    Bins are pooled left to right until each carries an expected count of at
    least ``min_expected``; a light-tailed remainder folds into the last bin.
    """
    observed = np.asarray(observed_counts, dtype=float)
    probs = np.asarray(expected_probs, dtype=float)
    if observed.shape != probs.shape:
        raise ValueError("observed and expected shapes differ")
    n = observed.sum()
    expected = probs * n

    obs_pool, exp_pool = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            obs_pool.append(acc_o)
            exp_pool.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0.0:
        if exp_pool:
            obs_pool[-1] += acc_o
            exp_pool[-1] += acc_e
        else:
            obs_pool.append(acc_o)
            exp_pool.append(acc_e)

    obs = np.asarray(obs_pool)
    exp = np.asarray(exp_pool)
    exp *= obs.sum() / exp.sum()  # absorb float dust so totals match
    dof = len(obs) - 1
    if dof <= 0:
        return 1.0
    stat = float(((obs - exp) ** 2 / exp).sum())
    return float(sps.chi2.sf(stat, dof))
