from fractions import Fraction

import pytest

from padic_gibbs.padic_core import PadicNumber, as_padic

GRID_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 29)
GRID_COUPLINGS = (-2, -1, 1, 2)
GRID = [(p, J) for p in GRID_PRIMES for J in GRID_COUPLINGS]


def primes_below(n: int) -> list[int]:
    sieve = bytearray([1]) * n
    sieve[:2] = b"\x00\x00"
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i in range(n) if sieve[i]]


def close(a, b, p: int, tolerance: int) -> bool:
    """|a - b|_p <= p^-tolerance, with exact rationals compared exactly."""
    if not isinstance(a, PadicNumber) and not isinstance(b, PadicNumber):
        return Fraction(a) == Fraction(b)
    K = max(x.abs_precision for x in (a, b) if isinstance(x, PadicNumber))
    d = as_padic(a, p, K) - as_padic(b, p, K)
    return d.valuation >= tolerance


@pytest.fixture
def grid():
    return GRID


# -- one pass/fail line per acceptance criterion -----------------------------

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and not report.failed):
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "failed": [], "ran": 0})
    entry["ran"] += report.when == "call"
    if report.failed:
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        verdict = "FAIL" if entry["failed"] else "PASS"
        line = f"criterion {number:>2}  {verdict}  {entry['title']}"
        if entry["failed"]:
            line += f"  (failing: {', '.join(entry['failed'])})"
        terminalreporter.write_line(line)
