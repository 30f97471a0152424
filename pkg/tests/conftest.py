import os

import hypothesis
import pytest

from resil.model import EventModel, LognormalRestore, OutageModel
from resil.empirical import EmpiricalEvent

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def typical_model():
    """Median North American transmission event: 14 outages, lognormal restores."""
    return EventModel(14, OutageModel(2.69), LognormalRestore(0.52, 1.64, 1.56))


@pytest.fixture
def footnote_event():
    # outages 1, 2, 3 restore in the order 2, 3, 1
    return EmpiricalEvent.from_arrays([0.0, 1.0, 2.0], [5.0, 3.0, 4.0])


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acceptance_log.LINES):
            terminalreporter.write_line(line)
