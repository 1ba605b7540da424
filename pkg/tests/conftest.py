import pytest
from hypothesis import settings

from primebounds.prime_core import build_table

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

N_MAIN = 10**6


@pytest.fixture(scope="session")
def table():
    # room for lookahead entries (p_{n+5}) at n = 10**6
    return build_table(N_MAIN + 6)


@pytest.fixture(scope="session")
def small_table():
    return build_table(2000)


# acceptance results, printed as one line per criterion at the end of the run
ACCEPTANCE = {}
SUITE_BUDGET_S = 180.0
_START = [0.0]


def pytest_sessionstart(session):
    import time

    _START[0] = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    import time

    if not ACCEPTANCE:
        return
    elapsed = time.perf_counter() - _START[0]
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        if key == 11:
            within = elapsed < SUITE_BUDGET_S
            ok = ok and within
            detail = f"{detail}; session wall time {elapsed:.1f} s (budget {SUITE_BUDGET_S:.0f} s)"
        tr.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def record():
    def _record(number, ok, detail):
        ACCEPTANCE[number] = (bool(ok), detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return _record
