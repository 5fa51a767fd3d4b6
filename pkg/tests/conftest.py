import numpy as np
import pytest

from delayfp import SchemeParams, generate_codebook


@pytest.fixture(scope="session")
def params():
    return SchemeParams(M=16, P=4, n=1024, delta_d=20, alpha=0.05)


@pytest.fixture(scope="session")
def codebook():
    return generate_codebook(16, 1024, seed=42, epsilon_orth=0.2)


@pytest.fixture(scope="session")
def host():
    # 64 frames of seeded noise
    return np.random.default_rng(7).uniform(-0.5, 0.5, 64 * 1024)


@pytest.fixture(scope="session")
def long_host():
    # 256 frames, enough headroom for averaged two-colluder peaks
    return np.random.default_rng(8).uniform(-0.5, 0.5, 256 * 1024)


def brute_cyclic_corr(a, b):
    """r[d] = sum_k a[k] b[(k + d) % n] by explicit loops."""
    n = len(a)
    return np.array([sum(a[k] * b[(k + d) % n] for k in range(n)) for d in range(n)])


_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record one acceptance line; the assertion still decides the test."""
    def record(number, text, ok):
        _CRITERIA[number] = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}"
        assert ok, text
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
