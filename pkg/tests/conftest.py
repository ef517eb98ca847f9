import numpy as np
import pytest

from e2tc.ellipsoid import EllipsoidSet, random_pd_matrix

_ACCEPTANCE = {}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_ellipsoid(rng):
    def make(d, centered=True, cond=10.0):
        A = random_pd_matrix(d, rng, cond)
        c = None if centered else rng.normal(scale=3.0, size=d)
        return EllipsoidSet.from_matrix(A, c)

    return make


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE[name] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda n: int(n.split("_")[1]) if n.split("_")[1].isdigit() else 99):
        outcome, dur = _ACCEPTANCE[name]
        flag = "PASS" if outcome == "passed" else outcome.upper()
        terminalreporter.write_line(f"[{flag}] {name} ({dur:.2f}s)")
    terminalreporter.write_line(
        "[N/A ] criterion 12: published OFUL/OLSOFUL solver numbers, replaced by criteria 5-7 and 10"
    )
