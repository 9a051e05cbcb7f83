import numpy as np
import pytest

from efplay import NnObjective, ToyLinearObjective, make_sine_dataset

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def sine():
    return make_sine_dataset()


@pytest.fixture(scope="session")
def nn():
    return NnObjective(1)


@pytest.fixture(scope="session")
def toy():
    return ToyLinearObjective("quadratic")


@pytest.fixture(scope="session")
def toy_zero():
    return ToyLinearObjective("zero")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def acceptance_report():
    """Collects one line per acceptance criterion for the terminal summary."""

    def report(label, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
