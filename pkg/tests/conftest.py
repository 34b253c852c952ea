import pytest

_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the terminal summary."""
    name = request.node.get_closest_marker("criterion").args[0]
    _CRITERIA[name] = "FAIL"
    yield lambda detail="": _CRITERIA.__setitem__(name, f"PASS {detail}".rstrip())


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion label")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda n: int(n.split()[0])):
        terminalreporter.write_line(f"{name}: {_CRITERIA[name]}")
