import numpy as np
import pytest

from pgfermi import pseudofermion as pf

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(params=["hermitian2", "ex1", "ex2", "ex3"])
def system(request):
    """One representative built system per family."""
    kind = request.param
    if kind == "hermitian2":
        pair = pf.CandidatePair.hermitian(2)
    elif kind == "ex3":
        pair = pf.example_family(pf.ExampleParams("ex3", alphas=(2.0, 3.0, 0.5j)))
    elif kind == "ex2":
        pair = pf.example_family(pf.ExampleParams("ex2", 1.5, -0.7, 2.0 + 1j, 0.8))
    else:
        pair = pf.example_family(pf.ExampleParams("ex1", alpha=2.0, beta=1j))
    return pf.build_system(pair)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
