"""Collects acceptance outcomes and prints one line per criterion at the end of the run."""
import time

import pytest

_RESULTS: dict[str, tuple[bool, str, float]] = {}


class Criterion:
    def __init__(self, key: str, title: str, limit: float | None):
        self.key, self.title, self.limit = key, title, limit
        self.notes: list[str] = []

    def note(self, text: str) -> None:
        self.notes.append(text)

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        dt = time.perf_counter() - self.t0
        ok = exc_type is None
        detail = "; ".join(self.notes)
        if ok and self.limit is not None and dt >= self.limit:
            ok = False
            detail = f"took {dt:.1f}s, limit {self.limit:.0f}s; " + detail
        elif not ok:
            detail = f"{exc_type.__name__}: {exc}".splitlines()[0] + ("; " + detail if detail else "")
        _RESULTS[self.key] = (ok, f"{self.title}: {detail}" if detail else self.title, dt)
        line = f"{self.key} {'PASS' if ok else 'FAIL'} ({dt:.1f}s) {_RESULTS[self.key][1]}"
        print(line)
        if exc_type is None and not ok:
            pytest.fail(line)
        return False


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_RESULTS, key=lambda k: int(k[1:])):
        ok, text, dt = _RESULTS[key]
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'} ({dt:.1f}s) {text}")
