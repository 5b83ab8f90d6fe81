import pytest

from locsym.bench import running_example
from locsym.decompose import decompose

ACCEPTANCE_LINES: list = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        number, title = marker.args
        verdict = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        ACCEPTANCE_LINES.append((number, f"criterion {number}: {verdict}  {title}"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def gc():
    return running_example()


@pytest.fixture(scope="session")
def gc_star(gc):
    return decompose(gc)


@pytest.fixture(scope="session")
def gc_solutions(gc):
    """All 7^7 candidate colourings filtered by brute force (slow, computed once)."""
    from locsym.transform import mx_solutions

    return mx_solutions(gc)
