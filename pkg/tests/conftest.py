import time

import pytest

from lowergap.certify import certify_instance
from lowergap.corpus import acceptance_corpus


@pytest.fixture(scope="session")
def corpus():
    return acceptance_corpus()


@pytest.fixture(scope="session")
def corpus_reports(corpus):
    """(instance, report) for every valid corpus instance; certified once per session."""
    start = time.perf_counter()
    reports = [(inst, certify_instance(inst)) for inst in corpus]
    CORPUS_TIMING["seconds"] = time.perf_counter() - start
    return reports


CORPUS_TIMING: dict[str, float] = {}


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def acceptance_line():
    """Record the one-line verdict of an acceptance criterion (printed in the terminal summary)."""
    def record(number: int, ok: bool, text: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}"
        ACCEPTANCE_LINES[number] = line
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
