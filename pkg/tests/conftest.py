import pytest

from dphist import RandomStream

ACCEPTANCE_LINES = []


@pytest.fixture
def stream(request):
    # a fixed seed per test keeps Monte Carlo checks reproducible
    return RandomStream(bytes(32), label=request.node.nodeid)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
