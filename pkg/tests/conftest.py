import pytest

from bellcount import CHRISTENSEN_MODEL, CHRISTENSEN_SETTINGS, load_bundled

TABLE_RAW = [29173, 34145, 34473, 1862]
TABLE_CORRECTED = [30008, 33721, 34687, 1867]
TABLE_QUANTUM = [31419, 33553, 33553, 484]
PUBLISHED_SCALE = 518_037
# per-setting trials back-computed from the raw and corrected rows
FIXTURE_TRIALS = [27220875, 28352073, 27827270, 27925014]


@pytest.fixture
def christensen_record():
    return load_bundled("christensen_table1.json")


@pytest.fixture
def model():
    return CHRISTENSEN_MODEL


@pytest.fixture
def settings():
    return CHRISTENSEN_SETTINGS


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(cid, title): exit criterion reported in the summary")
    config._acceptance = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        item.config._acceptance.append((marker.args, report.outcome))


def pytest_terminal_summary(terminalreporter, config):
    results = getattr(config, "_acceptance", [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for (cid, title), outcome in sorted(results, key=lambda r: r[0][0]):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {cid}: {title}")
