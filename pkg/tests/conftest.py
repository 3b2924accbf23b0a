import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from digifix import lattice as L  # noqa: E402


def small_corpus() -> dict:
    """Named images small enough for brute-force oracles (at most 8 points)."""
    imgs = {f"interval_0_{b}": L.interval(0, b) for b in range(0, 6)}
    imgs.update({f"C{n}": L.cycle(n) for n in (3, 4, 5)})
    for u in (1, 2):
        imgs[f"rect2x2_c{u}"] = L.box([(0, 1), (0, 1)], u)
        imgs[f"rect3x2_c{u}"] = L.box([(0, 2), (0, 1)], u)
    imgs["cube2_c1"] = L.cube([1, 1, 1], 1)
    return imgs


@pytest.fixture(scope="session")
def corpus():
    return small_corpus()


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.RESULTS:
            terminalreporter.write_line(line)
