import functools
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from cdgraph.constructors import build, builtin_corpus  # noqa: E402

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def corpus_group(name):
    return build(dict(builtin_corpus())[name], name=name)


@functools.lru_cache(maxsize=None)
def corpus_names(max_order=None):
    names = []
    for name, _ in builtin_corpus():
        if max_order is None or corpus_group(name).order <= max_order:
            names.append(name)
    return tuple(names)


@pytest.fixture
def group():
    return corpus_group


# --------------------------------------------------------------------------
# acceptance criteria report: one line per criterion in the terminal summary

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, text = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[number] = (text, report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        text, outcome = _CRITERIA[number]
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {text}")
