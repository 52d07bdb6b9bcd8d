import functools
import os

import pytest
from hypothesis import HealthCheck, settings

from slantlab.catalog import catalog_entries, get_entry
from slantlab.theorems import Analysis, RunOptions

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ENTRY_IDS = [e.id for e in catalog_entries()]


@functools.cache
def analysis(entry_id: str, samples: int = 6, seed: int = 0) -> Analysis:
    manifest = get_entry(entry_id).load()
    opts = manifest.run_options(samples=samples, seed=seed)
    return Analysis(manifest.chart, opts)


@pytest.fixture(scope="session")
def get_analysis():
    return analysis


@pytest.fixture(params=ENTRY_IDS)
def entry(request):
    return get_entry(request.param)


__all__ = ["analysis", "ENTRY_IDS", "RunOptions"]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if not LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(LINES, key=lambda k: (int(k.split(" ")[0]), k)):
        terminalreporter.write_line(LINES[key])
