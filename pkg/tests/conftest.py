import pytest

from lowmoments.coefficients import lambda_from_tau, lambda_table, tau_exact

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def lam_small():
    """Exact lambda(1..10**4), built without the cache."""
    return lambda_from_tau(tau_exact(10**4))


@pytest.fixture(scope="session")
def lam():
    return lambda_table(10**5)


@pytest.fixture(scope="session")
def lam_big():
    return lambda_table(10**6)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
