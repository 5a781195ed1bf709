import pytest

from boussinesq_lab.harness import simulate_times
from boussinesq_lab.spectral import PeriodicGrid, paper_gb, paper_mb

ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> str:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def paper_grid():
    return PeriodicGrid(800.0, 16384)


@pytest.fixture(scope="session")
def mb_snapshots(paper_grid):
    snaps = simulate_times(paper_mb(paper_grid), [50.0, 100.0, 300.0])
    return {s.t: s for s in snaps}


@pytest.fixture(scope="session")
def gb_snapshots(paper_grid):
    snaps = simulate_times(paper_gb(paper_grid), [50.0, 100.0, 300.0])
    return {s.t: s for s in snaps}
