"""Shared fixtures and the per-criterion PASS/FAIL summary."""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: dict = {}


def criterion(number: int, title: str):
    """Record the outcome of an acceptance test and print one status line."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                _RESULTS[number] = ("FAIL", title)
                print(f"FAIL criterion {number}: {title}")
                raise
            _RESULTS[number] = ("PASS", title)
            print(f"PASS criterion {number}: {title}")

        return run

    return wrap


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        status, title = _RESULTS[number]
        terminalreporter.write_line(f"{status} criterion {number}: {title}")


@functools.lru_cache(maxsize=None)
def _cross_validation(mu):
    from hetcycle.simulate import cross_validate, halton_seeds

    return cross_validate(mu, halton_seeds(50))


@pytest.fixture(scope="session")
def cross_validation():
    return _cross_validation


@pytest.fixture(scope="session")
def thresholds():
    from hetcycle.game import MU_INTERVAL
    from hetcycle.projective import detect_thresholds

    return detect_thresholds(MU_INTERVAL[0], MU_INTERVAL[1], 500)
