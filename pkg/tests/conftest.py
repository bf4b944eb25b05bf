import os

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from apfgrid.model import Light, Snapshot

settings.register_profile(
    "default", deadline=None, max_examples=150,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def make_snapshot(me: Light, *others) -> Snapshot:
    """Snapshot with ``others`` given as ``(dx, dy, light)`` triples."""
    return Snapshot(me, frozenset(((dx, dy), l) for dx, dy, l in others))


@pytest.fixture
def S():
    return make_snapshot


def point_sets(min_size=1, max_size=10, lo=-8, hi=8):
    pt = st.tuples(st.integers(lo, hi), st.integers(lo, hi))
    return st.lists(pt, min_size=min_size, max_size=max_size, unique=True)


# one line per acceptance criterion, printed after the run
VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    def record(name: str, ok: bool, detail: str = "") -> bool:
        VERDICTS.append(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
