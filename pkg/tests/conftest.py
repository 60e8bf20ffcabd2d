import pytest

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, limit): acceptance criterion with runtime limit in seconds")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        _ACCEPTANCE[props["criterion"]] = (report.outcome, report.duration, props.get("note"))


@pytest.fixture(autouse=True)
def _tag_criterion(request):
    m = request.node.get_closest_marker("criterion")
    if m is not None:
        request.node.user_properties.append(("criterion", (m.args[0], m.args[1], m.args[2])))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title, limit), (outcome, duration, note) in sorted(_ACCEPTANCE.items()):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  [{num}] {title} ({duration:.2f} s, limit {limit} s)")
        if note:
            terminalreporter.write_line(f"      {note}")
