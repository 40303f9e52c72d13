import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

REPO = Path(__file__).resolve().parents[1]
BREAST_CSV = REPO / "data" / "breast_wisconsin.csv"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def breast():
    from concise_tsk.dataio import load_csv
    return load_csv(BREAST_CSV, "class")


def two_blobs(n_per=20, d=2, gap=1.0, seed=0, spread=0.05):
    r = np.random.default_rng(seed)
    a = r.normal(0.2, spread, size=(n_per, d))
    b = r.normal(0.2 + gap * 0.6, spread, size=(n_per, d))
    X = np.clip(np.vstack([a, b]), 0, 1)
    y = np.array([0] * n_per + [1] * n_per)
    return X, y


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
