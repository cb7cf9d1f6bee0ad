import time

import pytest

_RESULTS: dict[int, str] = {}


class Criterion:
    """Context manager recording one acceptance line: PASS, FAIL or NOT RUN."""

    def __init__(self, number: int, title: str):
        self.number, self.title = number, title
        self.details: list[str] = []
        self.ok = True

    def check(self, condition: bool, detail: str) -> None:
        self.details.append(("" if condition else "FAILED ") + detail)
        self.ok = self.ok and bool(condition)

    def note(self, detail: str) -> None:
        self.details.append(detail)

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        seconds = time.perf_counter() - self.start
        if exc_type is not None and issubclass(exc_type, pytest.skip.Exception):
            status, extra = "NOT RUN", str(exc)
        elif exc_type is not None:
            status, extra = "FAIL", f"{exc_type.__name__}: {exc}".splitlines()[0]
        else:
            status, extra = ("PASS" if self.ok else "FAIL"), ""
        parts = self.details + ([extra] if extra else []) + [f"{seconds:.1f} s"]
        line = f"[{status}] criterion {self.number}: {self.title} | " + "; ".join(parts)
        _RESULTS[self.number] = line
        print(line)
        if exc_type is None:
            assert self.ok, line
        return False


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_RESULTS):
        terminalreporter.write_line(_RESULTS[number])
