import math

import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def three_sigma(p: float, n: int) -> float:
    return 3.0 * math.sqrt(p * (1.0 - p) / n)


@pytest.fixture
def rng():
    return np.random.default_rng(20260419)


def random_state(rng, dim=4):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


N_ACCEPT = 100_000


@pytest.fixture(scope="session")
def sessions():
    """10^5-pair sessions, seed 1, computed once and shared."""
    from mziqkd.adversary import InterceptResendCircular, NastySendLinear, NoAttack
    from mziqkd.protocol import SessionConfig, run_session

    cache = {}

    def get(name):
        if name not in cache:
            model = {"none": NoAttack(), "intercept": InterceptResendCircular(), "nasty": NastySendLinear(0.0)}[name]
            cache[name] = run_session(SessionConfig(N_ACCEPT, model, seed=1))
        return cache[name]

    return get
