import numpy as np
import pytest

from toa_lab import packet as pk

# Acceptance outcomes collected by tests/test_acceptance.py: criterion -> list of (part, ok, detail).
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


def record(criterion: int, part: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE.setdefault(criterion, []).append((part, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[criterion]
        verdict = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        terminalreporter.write_line(f"criterion {criterion}: {verdict}")
        for part, ok, detail in parts:
            terminalreporter.write_line(f"    [{'pass' if ok else 'FAIL'}] {part}: {detail}")


SUPERPOSITION_TERMS = [
    pk.GaussianTerm(1.0, -4.0, 1.0, 1.0),
    pk.GaussianTerm(0.6j, 1.0, 0.7, 0.3),
]


@pytest.fixture
def superposition():
    return pk.PacketSpec.normalized(SUPERPOSITION_TERMS)


@pytest.fixture
def three_terms():
    return pk.PacketSpec.normalized([
        pk.GaussianTerm(1.0, -2.0, 1.0, 1.5),
        pk.GaussianTerm(0.5 - 0.3j, 3.0, 0.6, -0.8),
        pk.GaussianTerm(-0.4j, 0.5, 1.7, 0.2),
    ])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
