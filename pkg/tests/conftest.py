import functools

import pytest

from gqovoid import classical


@functools.lru_cache(maxsize=None)
def geometry(family, q):
    return classical.build(family, q)


@pytest.fixture(scope="session")
def q5_2():
    return geometry("q5minus", 2)


@pytest.fixture(scope="session")
def q5_3():
    return geometry("q5minus", 3)


@pytest.fixture(scope="session")
def w2():
    return geometry("w", 2)


@pytest.fixture(scope="session")
def h4_2():
    return geometry("h4", 2)


# -- acceptance reporting ------------------------------------------------------------

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.fixture
def note(request):
    """Attach a one-line measurement to the current acceptance criterion."""
    notes = []
    request.node.user_properties.append(("notes", notes))
    return notes.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and report.passed):
        return
    n, title = marker.args
    notes = dict(item.user_properties).get("notes", [])
    prev = _criteria.get(n, (True, title, []))
    _criteria[n] = (prev[0] and report.passed, title, prev[2] + notes)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_criteria):
        passed, title, notes = _criteria[n]
        tr.write_line(f"criterion {n:>2}: {'PASS' if passed else 'FAIL'}  {title}")
        for line in dict.fromkeys(notes):
            tr.write_line(f"               {line}")
