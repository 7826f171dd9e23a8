import math
from pathlib import Path

import pytest
from hypothesis import settings

from cavnoise.model import RadiativePort, make_cavity_coefficients
from cavnoise.schemes import IDENTITY, BeamSplitterParams, SchemeSpec, compose

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ROOT = Path(__file__).resolve().parents[1]
SCHEME_DIR = ROOT / "data" / "schemes"
COEFF_DIR = ROOT / "data" / "coefficients"
QUARTER = math.pi / 4


@pytest.fixture
def nf_example():
    # gamma = 2, theta1 = pi/3, theta2 = pi/6 without feedback
    return make_cavity_coefficients(
        2.0, 5.0,
        [RadiativePort(math.sqrt(0.5), math.sqrt(1.5), -math.sqrt(3) / 4, [-0.75, 0.5])],
        [math.sqrt(1.5), 0.0],
    )


@pytest.fixture
def perturbed(nf_example):
    return nf_example.replace_port(0, r_o=-0.4)


@pytest.fixture
def symmetric_loss():
    return compose(SchemeSpec(
        "complete", gamma=1.0,
        splitters={"bs1": BeamSplitterParams(QUARTER), "bs2": BeamSplitterParams(QUARTER), "bs3": IDENTITY},
    ))


@pytest.fixture
def feedback_witness():
    return SchemeSpec(
        "complete", gamma=1.0,
        splitters={k: BeamSplitterParams(QUARTER) for k in ("bs1", "bs2", "bs3")},
    )


CRITERIA: dict[int, str] = {}


@pytest.fixture
def verdict():
    """Record a one-line pass/fail verdict for an acceptance criterion."""

    def record(number: int, title: str, ok: bool, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}"
        CRITERIA[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[n])
