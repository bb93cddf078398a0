import pytest

from bicusp.boxes import locate, point_coords

from builders import ACCEPTANCE, W


@pytest.fixture(scope="session")
def w_point():
    return W


@pytest.fixture(scope="session")
def w_code42():
    return locate(point_coords(*W), 42)


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
