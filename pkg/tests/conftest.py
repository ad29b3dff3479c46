import time

import numpy as np
import pytest

from flatfront import maps, mesh
from flatfront.figures import DIHEDRAL, DIHEDRAL_TARGETS
from flatfront.params import HGParams


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def dihedral():
    return HGParams(*DIHEDRAL)


@pytest.fixture(scope="session")
def dihedral_norm(dihedral):
    return maps.normalize_maps(dihedral, DIHEDRAL_TARGETS)


@pytest.fixture(scope="session")
def coarse_grid():
    return mesh.build_grid(resolution=(61, 26))


@pytest.fixture(scope="session")
def dihedral_coarse_lifts(dihedral, coarse_grid, dihedral_norm):
    return mesh.grid_lifts(dihedral, coarse_grid, dihedral_norm)


# ---------------------------------------------------------------------------
# acceptance report
# ---------------------------------------------------------------------------

_ACCEPTANCE = []


class _Criterion:
    def __init__(self, number, title, budget):
        self.number, self.title, self.budget = number, title, budget

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, kind, exc, tb):
        elapsed = time.perf_counter() - self.start
        over = exc is None and elapsed > self.budget
        ok = exc is None and not over
        detail = ""
        if exc is not None:
            detail = f": {str(exc).splitlines()[0] if str(exc) else type(exc).__name__}"
        elif over:
            detail = f": runtime over the {self.budget:g} s budget"
        line = (f"{'PASS' if ok else 'FAIL'}  criterion {self.number:2d}  {self.title}"
                f"  ({elapsed:.2f} s){detail}")
        _ACCEPTANCE.append((self.number, line))
        print(line)
        if over:
            raise AssertionError(f"criterion {self.number} took {elapsed:.2f} s "
                                 f"(budget {self.budget:g} s)")
        return False


@pytest.fixture
def criterion():
    """Context manager timing one acceptance criterion and recording its outcome."""
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)
