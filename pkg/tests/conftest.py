import pytest
from hypothesis import settings

from tennis_kam.profile import Harmonic, RacketProfile
from tennis_kam.tennis import TennisParams

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


@pytest.fixture(scope="session")
def small_cos():
    """f = 0.01 cos(2 pi t), g = 1: the diffusion regime (main condition true)."""
    return TennisParams(RacketProfile.cosine(0.01), g=1.0)


@pytest.fixture(scope="session")
def big_cos():
    """f = 0.2 cos(2 pi t), g = 1: non-concave residual, m < -g/2."""
    return TennisParams(RacketProfile.cosine(0.2), g=1.0, v_star=5.5292)


@pytest.fixture(scope="session")
def flat():
    return TennisParams(RacketProfile(), g=1.0, v_star=1.0)


@pytest.fixture(scope="session")
def mixed():
    """Two harmonics plus a phase shift; no symmetry to hide sign errors."""
    prof = RacketProfile((Harmonic(1, 0.03, -0.02), Harmonic(3, 0.004, 0.006)), mean_height=0.3)
    return TennisParams(prof, g=2.0)


# -- acceptance report -----------------------------------------------------------------

ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    """Record one acceptance criterion outcome; printed in the terminal summary."""

    def record(number: int, passed: bool, detail: str):
        ACCEPTANCE_RESULTS[number] = (bool(passed), detail)
        print(f"ACCEPTANCE {number:2d} {'PASS' if passed else 'FAIL'}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"ACCEPTANCE {number:2d} {'PASS' if passed else 'FAIL'}: {detail}")
