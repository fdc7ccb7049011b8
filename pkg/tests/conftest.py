import numpy as np
import pytest

from lsfft import generate

_acceptance = {}


@pytest.fixture(scope="session")
def obnosov64():
    return generate("obnosov", 64)


@pytest.fixture(scope="session")
def obnosov128():
    return generate("obnosov", 128)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def record():
    """Record the outcome of an acceptance criterion for the terminal summary."""
    def _record(name, passed, detail=""):
        _acceptance[name] = (bool(passed), detail)
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance, key=lambda s: (int(s.split()[1].rstrip("ab")), s)):
        passed, detail = _acceptance[name]
        terminalreporter.write_line(f"{name}: {'PASS' if passed else 'FAIL'}  {detail}")
