import pytest

ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.fixture
def record(request):
    """Store the verdict line for an acceptance criterion and assert it."""
    number, title = request.node.get_closest_marker("acceptance").args

    def _record(ok, detail=""):
        line = f"ACCEPTANCE {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
        ACCEPTANCE[number] = line + (f"  [{detail}]" if detail else "")
        assert ok, ACCEPTANCE[number]

    return _record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark and rep.when == "call" and rep.failed and mark.args[0] not in ACCEPTANCE:
        number, title = mark.args
        ACCEPTANCE[number] = f"ACCEPTANCE {number:2d} FAIL  {title}  [error: {call.excinfo.typename}]"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
