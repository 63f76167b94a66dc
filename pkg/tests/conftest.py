from pathlib import Path

import numpy as np
import pytest

from gateuniv.gates import CNOT, H, I2, S, T, X, Z
from gateuniv.gateset import make_gateset

GATESET_DIR = Path(__file__).resolve().parents[1] / "gatesets"


@pytest.fixture
def ht():
    return make_gateset(2, 1, [H, T], ["H", "T"])


@pytest.fixture
def clifford1():
    return make_gateset(2, 1, [H, S], ["H", "S"])


@pytest.fixture
def clifford2():
    return make_gateset(2, 2, [np.kron(H, I2), np.kron(S, I2), CNOT], ["H0", "S0", "CNOT"])


@pytest.fixture
def pauli():
    return make_gateset(2, 1, [X, Z], ["X", "Z"])


@pytest.fixture
def gateset_dir():
    return GATESET_DIR


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
