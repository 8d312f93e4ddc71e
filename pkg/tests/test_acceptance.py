"""Acceptance suite: every criterion at its stated tolerance, one pass/fail
line per criterion run, on seeds {7, 11, 13}.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines, or `python -m hardylab.cli reproduce` for CSV output as well.
"""

import pytest

from hardylab import acceptance

SEEDS = acceptance.DEFAULT_SEEDS


def _run_and_report(cid, seed):
    res = acceptance.CRITERIA[cid](seed)
    print()
    print(res.header())
    for line in res.lines:
        print(line)
    assert res.passed, f"criterion {cid} failed on seed {seed}"


@pytest.mark.parametrize("seed", SEEDS)
def test_criterion_01_kernel_zoo_thresholds(seed):
    _run_and_report(1, seed)


@pytest.mark.parametrize("seed", SEEDS)
def test_criterion_02_log_rate_constancy(seed):
    _run_and_report(2, seed)


@pytest.mark.parametrize("seed", SEEDS)
def test_criterion_03_local_bound(seed):
    _run_and_report(3, seed)


@pytest.mark.parametrize("seed", SEEDS)
def test_criterion_04_containment(seed):
    _run_and_report(4, seed)


@pytest.mark.parametrize("seed", SEEDS)
def test_criterion_05_levi_reciprocal(seed):
    _run_and_report(5, seed)


@pytest.mark.parametrize("seed", SEEDS)
def test_criterion_06_levi_power(seed):
    _run_and_report(6, seed)


@pytest.mark.parametrize("seed", SEEDS)
def test_criterion_07_harmonic_thresholds(seed):
    _run_and_report(7, seed)


@pytest.mark.parametrize("seed", SEEDS)
def test_criterion_08_levi_estimate(seed):
    _run_and_report(8, seed)


@pytest.mark.parametrize("seed", SEEDS)
def test_criterion_09_density_demo(seed):
    _run_and_report(9, seed)


@pytest.mark.parametrize("seed", SEEDS)
def test_criterion_10_property_suites(seed):
    _run_and_report(10, seed)
