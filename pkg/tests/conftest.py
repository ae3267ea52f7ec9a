import pytest

from cospread.graph import SignedGraph

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(cid, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "_acceptance", None)
    if marker is None or (report.when != "call" and report.outcome == "passed"):
        return
    cid, title = marker
    _ACCEPTANCE.setdefault(cid, [title, []])[1].append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    m = item.get_closest_marker("acceptance")
    if m is not None:
        outcome.get_result()._acceptance = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_ACCEPTANCE, key=lambda c: int(c[1:])):
        title, outcomes = _ACCEPTANCE[cid]
        if "failed" in outcomes:
            verdict = "FAIL"
        elif all(o == "skipped" for o in outcomes):
            verdict = "SKIP"
        else:
            verdict = "PASS"
        terminalreporter.write_line(f"{verdict:4}  {cid}  {title}")


@pytest.fixture
def triangle():
    return SignedGraph.from_triples([(0, 1, 1), (1, 2, 1), (0, 2, 1)])


@pytest.fixture
def star5():
    return SignedGraph.from_triples([(0, i, 1) for i in range(1, 5)])


@pytest.fixture
def cycle4():
    return SignedGraph.from_triples([(0, 1, 1), (1, 2, -1), (2, 3, 1), (3, 0, -1)])


@pytest.fixture
def bridged_stars():
    # centres 0 and 4, joined by the bridge 0-4
    return SignedGraph.from_triples(
        [(0, 1, 1), (0, 2, 1), (0, 3, -1), (4, 5, -1), (4, 6, -1), (4, 7, 1), (0, 4, 1)]
    )
