import pytest

ACCEPTANCE_LINES: list[str] = []


def pytest_addoption(parser):
    parser.addoption("--long-run", action="store_true", default=False,
                     help="also run the long isotropy checks (r up to 20, tolerance 0.05)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--long-run"):
        return
    skip = pytest.mark.skip(reason="needs --long-run")
    for item in items:
        if "long_run" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def report():
    """Record one acceptance line; it is echoed now and in the terminal summary."""

    def add(line: str):
        ACCEPTANCE_LINES.append(line)
        print(line)

    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
