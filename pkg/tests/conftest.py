import functools

import numpy as np
import pytest
from hypothesis import settings

from affine_hsp import finite_field as ff

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

SMALL_FIELDS = [(2, 2), (5, 1), (7, 1), (2, 3), (3, 2)]  # q = 4, 5, 7, 8, 9
ALL_FIELDS = SMALL_FIELDS + [(2, 4)]                    # plus q = 16


@functools.lru_cache(maxsize=None)
def field(p, n=1):
    return ff.build_field(p, n)


@pytest.fixture(params=SMALL_FIELDS, ids=lambda pn: f"q{pn[0] ** pn[1]}")
def small_field(request):
    return field(*request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# -- acceptance criteria summary ------------------------------------------------

_CRITERIA: dict[int, list[bool]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _CRITERIA.setdefault(marker.args[0], []).append(rep.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        results = _CRITERIA[num]
        verdict = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(
            f"criterion {num}: {verdict} ({sum(results)}/{len(results)} checks passed)")
