import pytest

from nkimit import landscape as nk

ACCEPTANCE_RESULTS: list[str] = []


@pytest.fixture
def report():
    """Record one acceptance line; printed in the terminal summary."""

    def _report(criterion: str, passed: bool, detail: str) -> None:
        ACCEPTANCE_RESULTS.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture
def tiny():
    """n=2, k=0 landscape with hand-picked tables."""
    return nk.NKLandscape(2, 0, [[0.3, 0.7], [0.1, 0.9]])


@pytest.fixture(scope="session")
def smooth12():
    ls = nk.generate(12, 0, 11)
    nk.find_global_maximum(ls)
    return ls


@pytest.fixture(scope="session")
def rugged12():
    ls = nk.generate(12, 2, 5)
    nk.find_global_maximum(ls)
    return ls
