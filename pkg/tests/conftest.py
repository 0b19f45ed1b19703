import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from blockmatch import EstimatorConfig, SynthSpec, synth  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def translate_seq():
    return synth(SynthSpec("random-texture-translate", (3, 2), 64, 64, 5, seed=3))


@pytest.fixture
def cfg():
    return EstimatorConfig()


def interior_blocks(width, height, n, mv):
    """Blocks whose true match lies entirely inside the reference frame."""
    for r in range(height // n):
        for c in range(width // n):
            x0, y0 = c * n, r * n
            if 0 <= x0 + mv[0] <= width - n and 0 <= y0 + mv[1] <= height - n:
                yield r, c


# --- acceptance summary: one PASS/FAIL line per criterion ---------------------

_criterion_of = {}  # nodeid -> (number, wording, case label)
_verdicts = {}  # number -> (wording, ids of failing cases)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number and wording")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            params = getattr(getattr(item, "callspec", None), "params", {})
            label = ", ".join(f"{k}={v}" for k, v in params.items()) or item.name
            _criterion_of[item.nodeid] = (*m.args, label)


def pytest_runtest_logreport(report):
    if report.nodeid not in _criterion_of:
        return
    if report.when == "call" or report.outcome != "passed":
        n, text, label = _criterion_of[report.nodeid]
        failed = _verdicts.setdefault(n, (text, []))[1]
        if not report.passed or hasattr(report, "wasxfail"):
            failed.append(label)


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_verdicts):
        text, failed = _verdicts[n]
        verdict = f"FAIL [{'; '.join(failed)}]" if failed else "PASS"
        terminalreporter.write_line(f"criterion {n:>2}: {verdict}  {text}")
