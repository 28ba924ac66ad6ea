import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

from leflab.model import builtin, catalog  # noqa: E402

CATALOG = catalog()
SMALL = ["t2", "t4", "kodaira_thurston"]


@pytest.fixture(params=CATALOG)
def any_model(request):
    return builtin(request.param)


@pytest.fixture
def t4():
    return builtin("t4")


@pytest.fixture
def kt():
    return builtin("kodaira_thurston")


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
