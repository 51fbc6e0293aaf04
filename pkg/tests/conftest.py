from __future__ import annotations

from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS = FIXTURES / "corpus"
BAD = FIXTURES / "bad"

_criteria: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(name): marks a test as one acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call":
        marker = item.get_closest_marker("criterion")
        if marker:
            status = "PASS" if report.passed else (
                "SKIP" if report.skipped else "FAIL")
            _criteria.append((marker.args[0], status))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for name, status in _criteria:
            terminalreporter.write_line(f"[{status}] {name}")


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    assert CORPUS.is_dir(), "run scripts/make_fixtures.py first"
    return CORPUS


@pytest.fixture(scope="session")
def bad_dir() -> Path:
    return BAD


@pytest.fixture(scope="session")
def corpus_paths(corpus_dir) -> list[Path]:
    return sorted(corpus_dir.glob("*.step"))


@pytest.fixture(scope="session")
def cube_text(corpus_dir) -> str:
    return (corpus_dir / "cube_unit.step").read_text(encoding="utf-8")


@pytest.fixture()
def cube_file(cube_text):
    from cadaug.step.parser import parse_step
    return parse_step(cube_text)
