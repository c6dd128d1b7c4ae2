import pytest

from repdiff.config import load_config
from repdiff.pipeline import run_proof


@pytest.fixture(scope="session")
def proofs():
    """Both built-in proofs, computed once per session."""
    return {name: run_proof(load_config(name)) for name in ("balancing", "lucas-balancing")}


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
