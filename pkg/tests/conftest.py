import numpy as np
import pytest

from overshoot.canon import Plant, is_controllable


def random_controllable(rng, n, m, low=-2.0, high=2.0):
    while True:
        p = Plant(rng.uniform(low, high, (n, n)), rng.uniform(low, high, (n, m)))
        if is_controllable(p):
            return p


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def example_plant():
    from overshoot.fixtures import EXAMPLE_A, EXAMPLE_B

    return Plant(EXAMPLE_A, EXAMPLE_B)


def pytest_terminal_summary(terminalreporter):
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py::test_criterion" in getattr(rep, "nodeid", "") and rep.when == "call":
                name = rep.nodeid.split("::")[-1]
                rows.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict in sorted(rows, key=lambda r: int(r[0].split("_")[2])):
        terminalreporter.write_line(f"{verdict}  {name}")
