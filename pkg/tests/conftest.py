import time
from contextlib import contextmanager

import pytest


@pytest.fixture
def criterion(capsys):
    """Acceptance reporter: one PASS/FAIL line per criterion, printed past
    pytest's capture so it is visible in any run mode."""

    @contextmanager
    def report(name):
        started = time.monotonic()
        try:
            yield
        except BaseException:
            with capsys.disabled():
                print(f"[acceptance] {name}: FAIL ({time.monotonic() - started:.1f}s)",
                      flush=True)
            raise
        with capsys.disabled():
            print(f"[acceptance] {name}: PASS ({time.monotonic() - started:.1f}s)",
                  flush=True)

    return report
