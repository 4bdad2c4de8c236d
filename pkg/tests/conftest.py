import pytest

from ltrm import FrozenClock, Granularity, load_fixture, make_timepoint, parse_timepoint

ACCEPTANCE_RESULTS: dict[str, tuple[str, str]] = {}


def day(text: str):
    return parse_timepoint(text, Granularity.DAY)


@pytest.fixture
def clock():
    """Frozen at 15-06-2006, after every date in the fixture."""
    return FrozenClock.at(make_timepoint(2006, 6, 15))


@pytest.fixture
def fixture_db(clock):
    return load_fixture(clock)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k[1:])):
        status, title = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{status} {key}: {title}")
