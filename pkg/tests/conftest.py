import math

import pytest
from hypothesis import settings

from expwidth.criteria import Analysis, EstimationParams
from expwidth.generators import generate

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def harmonic():
    """{1, 2, ..., 10^6} on the positive axis."""
    return generate("arith n=10^6")


@pytest.fixture(scope="session")
def harmonic_analysis(harmonic):
    return Analysis(harmonic, EstimationParams())


@pytest.fixture(scope="session")
def imaginary():
    return generate("arith n=10^6 dir=pi/2")


PI = math.pi


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
