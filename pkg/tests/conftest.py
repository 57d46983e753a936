import pytest
from hypothesis import HealthCheck, settings

from orbhae import build_all, build_rtable

settings.register_profile(
    "orbhae", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("orbhae")

N = 40


@pytest.fixture(scope="session")
def mirror():
    return build_all(N, guard=24)


@pytest.fixture(scope="session")
def table(mirror):
    return build_rtable(8, mirror=mirror)


@pytest.fixture(scope="session")
def pots():
    """Shared cache of symbolic potentials keyed by (g, insertions)."""
    return {}


CRITERIA: dict = {}


def record(number: int, label: str, ok: bool) -> None:
    """Log one acceptance sub-check; a criterion passes when all of its parts do."""
    entry = CRITERIA.setdefault(number, {"label": label, "parts": []})
    entry["parts"].append(ok)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        entry = CRITERIA[number]
        status = "PASS" if all(entry["parts"]) else "FAIL"
        terminalreporter.write_line(f"{status}  criterion {number}: {entry['label']}")
