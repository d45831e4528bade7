import csv
import os
from pathlib import Path

import numpy as np
import pytest

from cabf.affine import ORBIT_LIMIT, default_registry

DATA = Path(__file__).parent / "data"


def load_census(name: str) -> dict[str, dict[str, str]]:
    with open(DATA / name, newline="") as fh:
        return {row["class"]: row for row in csv.DictReader(fh)}


@pytest.fixture(scope="session")
def registry():
    return default_registry()


@pytest.fixture(scope="session")
def enumerable_classes(registry):
    return [e for e in registry if e.expected_count <= ORBIT_LIMIT]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_addoption(parser):
    parser.addoption("--full-sweep", action="store_true", help="run the exhaustive 2**32 sweep")


_CRITERION_OF: dict[str, int] = {}
_ACCEPTANCE: dict[int, list[str]] = {}


def pytest_collection_modifyitems(config, items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            _CRITERION_OF[item.nodeid] = mark.args[0]
    if config.getoption("--full-sweep") or os.environ.get("CABF_FULL_SWEEP") == "1":
        return
    skip = pytest.mark.skip(reason="exhaustive sweep is opt-in: --full-sweep or CABF_FULL_SWEEP=1")
    for item in items:
        if "full_sweep" in item.keywords:
            item.add_marker(skip)


# ----------------------------------------------------------------- acceptance summary


def pytest_runtest_logreport(report):
    n = _CRITERION_OF.get(report.nodeid)
    if n is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE.setdefault(n, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        outcomes = _ACCEPTANCE[n]
        if "failed" in outcomes:
            status = "FAIL"
        elif all(o == "skipped" for o in outcomes):
            status = "SKIP (opt-in)"
        else:
            status = "PASS"
        terminalreporter.write_line(f"ACCEPTANCE criterion {n}: {status} ({len(outcomes)} checks)")
