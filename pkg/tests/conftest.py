import contextlib
import time

import pytest

# criterion number -> (title, passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


class Criterion:
    def __init__(self):
        self.detail = ""

    @contextlib.contextmanager
    def __call__(self, number: int, title: str):
        t0 = time.perf_counter()
        self.detail = ""
        try:
            yield self
        except BaseException as err:
            msg = str(err).splitlines()[0] if str(err) else type(err).__name__
            ACCEPTANCE[number] = (title, False, msg[:160])
            raise
        took = time.perf_counter() - t0
        ACCEPTANCE[number] = (title, True, f"{self.detail} [{took:.1f}s]".strip())


@pytest.fixture
def criterion():
    return Criterion()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
