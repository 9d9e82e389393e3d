import os
from pathlib import Path

import pytest
from hypothesis import settings

from logkummer.dedekind import DedekindLogBase

settings.register_profile("default", max_examples=60, deadline=None)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def base_z(support=("5",)) -> DedekindLogBase:
    return DedekindLogBase.create("Z", [], {"2": [], "3": [], "5": []}, 0, 2, support)


def base_qs5(support=("p2", "p3", "p3b")) -> DedekindLogBase:
    classes = {"p2": [1], "p3": [1], "p3b": [1], "p5": [0], "p7": [1], "p7b": [1]}
    return DedekindLogBase.create("Q(sqrt-5)", [2], classes, 0, 2, support)


@pytest.fixture
def zbase():
    return base_z()


@pytest.fixture
def qbase():
    return base_qs5()


@pytest.fixture
def configs_dir():
    return CONFIGS


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
