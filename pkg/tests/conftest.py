"""Test configuration: the opt-in slow marker and the acceptance report."""

import os

import pytest


_REPORT = pytest.StashKey[list]()


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long runs, enabled with DOMCLIQUE_SLOW=1")
    config.stash[_REPORT] = []


@pytest.fixture
def verdict(request, capsys):
    """Print and record one PASS/FAIL line, then fail the test if needed."""

    def emit(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
        request.config.stash[_REPORT].append(line)
        with capsys.disabled():
            print(f"\n{line}")
        assert ok, line

    return emit


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_REPORT, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def pytest_collection_modifyitems(config, items):
    if os.environ.get("DOMCLIQUE_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="set DOMCLIQUE_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
