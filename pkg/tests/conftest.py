import itertools

import numpy as np
import pytest


def multiset_orderings(n_d, n_data):
    """Every distinct U/D row with ``n_d`` D slots (2 = U, 3 = D)."""
    return sorted(set(itertools.permutations([3] * n_d + [2] * (n_data - n_d))))


def scan_icr(macro_row, small_row, downlink_pilot):
    # regime rule restated slot by slot: a downlink pilot makes opposite
    # directions harmful, an uplink pilot makes equal directions harmful.
    if downlink_pilot:
        return sum(m != s for m, s in zip(macro_row, small_row))
    return sum(m == s for m, s in zip(macro_row, small_row))


def brute_min_icr(n_dm, n_ds, n_data, downlink_pilot):
    small = multiset_orderings(n_ds, n_data)
    return min(
        scan_icr(m, s, downlink_pilot) for m in multiset_orderings(n_dm, n_data) for s in small
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_VERDICTS: dict[int, str] = {}


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number: int, ok: bool, detail: str):
        _VERDICTS[number] = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {detail}"
        print(_VERDICTS[number])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_VERDICTS):
            terminalreporter.write_line(_VERDICTS[n])
