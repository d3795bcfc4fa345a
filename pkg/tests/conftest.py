import json
from pathlib import Path

import numpy as np
import pytest

from slopelab import families as fam


def float_resistances(g, skip=None):
    """Resistance matrix via the Moore-Penrose pseudo-inverse."""
    n = len(g.vertices)
    lap = np.zeros((n, n))
    for e in g.edges:
        if e.is_loop or e.id == skip:
            continue
        a, b = g.index[e.u], g.index[e.v]
        c = 1.0 / float(e.length)
        lap[a, a] += c
        lap[b, b] += c
        lap[a, b] -= c
        lap[b, a] -= c
    lp = np.linalg.pinv(lap)
    d = np.diag(lp)
    return d[:, None] + d[None, :] - 2 * lp


@pytest.fixture
def write_json(tmp_path):
    def _write(name, obj):
        path = Path(tmp_path) / name
        path.write_text(json.dumps(obj))
        return str(path)

    return _write


@pytest.fixture
def twogon_dict():
    return {
        "vertices": [{"id": "p1", "genus": 1}, {"id": "p2", "genus": 2}],
        "edges": [
            {"id": "e1", "u": "p1", "v": "p2", "length": "2"},
            {"id": "e2", "u": "p1", "v": "p2", "length": "3/2"},
        ],
    }


@pytest.fixture
def dumbbell_dict():
    return fam.dumbbell(1, 2, 3).to_dict()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
