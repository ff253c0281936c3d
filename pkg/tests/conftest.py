import functools

import pytest

CRITERIA: dict[int, str] = {}


def criterion(number: int, title: str):
    """Record a pass/fail line for an acceptance criterion without swallowing failures."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                line = f"criterion {number:2d} FAIL  {title}: {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
                CRITERIA[number] = line
                print(line)
                raise
            line = f"criterion {number:2d} PASS  {title}" + (f": {detail}" if detail else "")
            CRITERIA[number] = line
            print(line)

        return run

    return wrap


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[number])


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240611)
