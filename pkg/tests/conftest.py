import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from threadpoolctl import threadpool_limits

sys.path.insert(0, str(Path(__file__).parent))

from latticeloc import LatticeBox, Signal  # noqa: E402

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_LIMITS = threadpool_limits(limits=1)

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "passed": 0, "failed": 0})
    if call.excinfo is None:
        entry["passed"] += 1
    else:
        entry["failed"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        status = "PASS" if e["failed"] == 0 else "FAIL"
        terminalreporter.write_line(
            f"criterion {number:2d} {status}  {e['title']} ({e['passed']} passed, {e['failed']} failed)"
        )


def make_signal(rng, dim, radius, real=False):
    box = LatticeBox(dim, radius)
    vals = rng.standard_normal(box.size)
    if not real:
        vals = vals + 1j * rng.standard_normal(box.size)
    return Signal(box, vals)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
