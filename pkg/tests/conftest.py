import pytest

from iqpoisson.rootdata import preset

CRITERIA: dict = {}


def pytest_addoption(parser):
    parser.addoption("--expensive", action="store_true", default=False,
                     help="run FII, DII4 and G2 checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--expensive"):
        return
    skip = pytest.mark.skip(reason="needs --expensive")
    for item in items:
        if "expensive" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[k])


@pytest.fixture
def expensive(request):
    return request.config.getoption("--expensive")


@pytest.fixture(params=["AI2", "AIV2", "AIII3", "CI2"])
def table_preset(request):
    return preset(request.param)
