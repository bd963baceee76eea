import numpy as np
import pytest

from bosonic_capacity import _backend


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[n for n in _backend.AVAILABLE
                        if n != "numba" or _backend.numba_available()])
def backend(request):
    with _backend.use(request.param) as kernels:
        yield kernels


# -- acceptance reporting ---------------------------------------------------
# Tests marked ``criterion(n, title)`` get one PASS/FAIL line each in the
# terminal summary, whatever the capture mode.

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, [title, True, 0.0])
    entry[1] = entry[1] and report.passed
    entry[2] += report.duration


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, seconds = _CRITERIA[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {status}  {title} ({seconds:.2f} s)")
