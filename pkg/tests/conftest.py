import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import random_problem  # noqa: E402

from quadreg.core import Dataset, compute_precomputation  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def make_problem():
    def _make(n, p, seed=0, noise=1.0):
        X, y = random_problem(np.random.default_rng(seed), n, p, noise)
        ds = Dataset(X, y)
        return ds, compute_precomputation(ds)
    return _make


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call":
                continue
            for key, value in rep.user_properties:
                if key == "criterion":
                    number, detail = value
                    lines.append((number, f"criterion {number}: {outcome[:4].upper()}  {detail}"))
    if lines:
        terminalreporter.section("acceptance")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
