"""One pass/fail line per acceptance criterion, full (non-quick) mode."""

import pytest

from recolorlab.harness import acceptance


def _check(number):
    result = acceptance.CRITERIA[number - 1](False)
    print(result.line())
    assert result.number == number
    assert result.ok, result.line()


def test_criterion_01_rebalance_fptas_vs_exact():
    _check(1)


def test_criterion_02_tracker_ledger_loads():
    _check(2)


def test_criterion_03_odd_cycle_separation():
    _check(3)


def test_criterion_04_greedy_cost_per_phase():
    _check(4)


def test_criterion_05_follow_greedy_bounds():
    _check(5)


def test_criterion_06_oracle_cross_validation():
    _check(6)


def test_criterion_07_online_vertex_cover():
    _check(7)


def test_criterion_08_deterministic_delta():
    _check(8)


@pytest.mark.slow
def test_criterion_09_randomized_delta():
    _check(9)


def test_criterion_10_replay_determinism():
    _check(10)
