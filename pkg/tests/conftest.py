import numpy as np
import pytest

from ternapg.device import IDEAL_MODEL, build_device
from ternapg.enrollment import TernaryMap, enroll

FIG7_ID = b"PasswordManagementWithWifire"
FIG7_PW = b"1-MBIT SRAM"


@pytest.fixture(scope="session")
def default_device():
    return build_device(device_seed=2021)


@pytest.fixture(scope="session")
def default_map(default_device):
    return enroll(default_device, 200, base_seed=0)


@pytest.fixture(scope="session")
def ideal_device():
    return build_device(model=IDEAL_MODEL, device_seed=99)


@pytest.fixture(scope="session")
def ideal_map(ideal_device):
    return enroll(ideal_device, 2, base_seed=0)


def make_map(states, read_count=2):
    return TernaryMap(np.asarray(states, dtype=np.uint8), read_count)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")
    config._criteria = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark and (report.when == "call" or report.failed):
        item.config._criteria.append((mark.args[0], mark.args[1], report.outcome))


def pytest_terminal_summary(terminalreporter, config):
    rows = sorted(config._criteria)
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for number, text, outcome in rows:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number:2d}: {text}")
