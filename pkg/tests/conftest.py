import numpy as np
import pytest

from mixedplate.benchmarks import disk_benchmark_geometry, square_benchmark_geometry


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def square_geo():
    return square_benchmark_geometry()


@pytest.fixture(scope="session")
def disk_geo():
    return disk_benchmark_geometry()


ACCEPTANCE = []  # (criterion number, title, passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {num} [{'PASS' if ok else 'FAIL'}] {title}: {detail}")
