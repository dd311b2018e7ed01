import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hheml.he import BFV_TOY, TRANSPARENT, default_params, he_keygen  # noqa: E402

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def bfv257():
    """bfv-toy keys at p = 257 with the default ring; shared because keygen is not free."""
    return he_keygen(default_params(BFV_TOY, 257), 1234)


@pytest.fixture(scope="session")
def transparent257():
    return he_keygen(default_params(TRANSPARENT, 257), 0)


_criteria = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    marker = next((m for m in report.keywords if m.startswith("criterion_")), None)
    if marker is None:
        return
    if report.when == "call" or report.outcome != "passed":
        prev = _criteria.get(marker, "PASS")
        _criteria[marker] = "PASS" if prev == "PASS" and report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda k: int(k.split("_")[1])):
        terminalreporter.write_line(f"criterion {name.split('_')[1]}: {_criteria[name]}")


def pytest_configure(config):
    for n in range(1, 10):
        config.addinivalue_line("markers", f"criterion_{n}: acceptance criterion {n}")
