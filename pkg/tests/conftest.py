import pytest
from hypothesis import HealthCheck, settings

from supercartan.catalog import catalog_algebra
from supercartan.clifford import build_gamma

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def rep4():
    return build_gamma(4, (1, 3))


@pytest.fixture(scope="session")
def rep11():
    return build_gamma(11)


@pytest.fixture(scope="session")
def sp4():
    return catalog_algebra("super-poincare", 4)


@pytest.fixture(scope="session")
def sp11():
    return catalog_algebra("super-poincare", 11)


# one summary line per acceptance criterion
_CRITERIA: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call":
        return
    number, title = mark.args
    _CRITERIA[number] = (title, "PASS" if report.passed else "FAIL", report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status, seconds = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title} ({seconds:.1f} s)")
