import pytest

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            number, title = marker.args
            entry = _CRITERIA.setdefault(number, {"title": title, "tests": {}})
            entry["tests"][item.nodeid] = None


def pytest_runtest_logreport(report):
    for entry in _CRITERIA.values():
        if report.nodeid in entry["tests"]:
            if report.when == "call" or report.outcome != "passed":
                previous = entry["tests"][report.nodeid]
                if previous in (None, "passed"):
                    entry["tests"][report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        outcomes = list(entry["tests"].values())
        if any(o is None for o in outcomes):
            status = "NOT RUN"
        elif all(o == "passed" for o in outcomes):
            status = "PASS"
        else:
            status = "FAIL"
        failing = [nid.split("::")[-1] for nid, o in entry["tests"].items() if o not in ("passed", None)]
        suffix = f"  (failing: {', '.join(failing)})" if failing else ""
        terminalreporter.write_line(f"criterion {number:>2} {status:<7} {entry['title']}{suffix}")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240611)
