import sys
from pathlib import Path

import pytest

from segtr.morphdict import load_dictionary

DATA = Path(__file__).resolve().parents[1] / "src" / "segtr" / "data"


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def fixture_dict():
    return load_dictionary(DATA / "fixture_dict.tsv")


@pytest.fixture(scope="session")
def running_examples():
    return (DATA / "running_examples.txt").read_text(encoding="utf-8").splitlines()


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
