import pytest

from qcopt.tokenizer import default_vocabulary
from qcopt.tokenopt.heuristics import default_resources


@pytest.fixture(scope="session")
def vocab():
    return default_vocabulary()


@pytest.fixture(scope="session")
def res():
    return default_resources()


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.result_lines() + mod.EXTRA:
        terminalreporter.write_line(line)
