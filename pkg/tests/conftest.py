import pytest

_outcomes: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def note(request):
    """Attach a one-line detail to the acceptance summary for this test."""
    def _note(text):
        request.node.user_properties.append(("detail", text))
    return _note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.skipped:
        return
    if rep.when == "call" or rep.failed:
        num, title = mark.args
        detail = "; ".join(v for k, v in item.user_properties if k == "detail")
        if rep.failed:
            detail = (detail + "; " if detail else "") + "assertion failed"
        _outcomes[num] = (title, rep.passed and _outcomes.get(num, ("", True, ""))[1], detail)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_outcomes):
        title, ok, detail = _outcomes[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {title} :: {detail}")
