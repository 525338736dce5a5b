from __future__ import annotations

import math

import numpy as np
import pytest

from ewalk.core import CoinSequence, WaveFunction


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed 2x2 unitary."""
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(rng: np.random.Generator, cells: int = 5, offset: int = -2) -> WaveFunction:
    amps = rng.normal(size=(cells, 2)) + 1j * rng.normal(size=(cells, 2))
    return WaveFunction(offset, amps / np.linalg.norm(amps))


def random_coins(rng: np.random.Generator, period: int) -> CoinSequence:
    return CoinSequence.periodic([random_unitary(rng) for _ in range(period)])


def coprime_fields(max_den: int):
    for m in range(1, max_den + 1):
        for n in range(m):
            if math.gcd(n, m) == 1:
                yield n, m


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, passed: bool, detail: str) -> None:
    """Remember one acceptance verdict for the terminal summary."""
    ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
