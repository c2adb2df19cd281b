from __future__ import annotations

import pytest

from chaos_census.covering import SetCollection


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("CHAOS_CENSUS_CACHE", str(tmp_path / "mu-cache.json"))


@pytest.fixture
def six_cycle_of_triples() -> SetCollection:
    # (3,6) double-covering whose multigraph is a 6-cycle with alternating double edges
    return SetCollection.of([[1, 2, 3], [3, 4, 5], [4, 5, 6], [6, 7, 8], [7, 8, 9], [1, 2, 9]])


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(k))
