import pytest

from nonord.qseries import CM9, LEVEL8, expand_eta_quotient


@pytest.fixture(scope="session")
def level8():
    return expand_eta_quotient(LEVEL8, 20000)


@pytest.fixture(scope="session")
def cm9():
    return expand_eta_quotient(CM9, 20000)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Record a one-line PASS/FAIL verdict for an acceptance criterion."""
    state = {}

    def declare(number, text):
        state["label"] = f"criterion {number:>2}: {text}"

    yield declare
    if "label" in state:
        rep = getattr(request.node, "rep_call", None)
        ok = rep is not None and rep.passed
        line = f"{'PASS' if ok else 'FAIL'}  {state['label']}"
        ACCEPTANCE_LINES.append(line)
        print("\n" + line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
