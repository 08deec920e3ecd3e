import os

import pytest
from hypothesis import HealthCheck, settings

from nullwave import InitialDatum, SystemSpec

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

TARTAR_TRIPLETS = [(1, 1, 2, -0.5), (1, 2, 1, -0.5), (2, 1, 2, -0.5), (2, 2, 1, -0.5)]

# criterion number -> (passed, message), filled by test_acceptance
ACCEPTANCE_LINES = {}


def alpha_beta_system(alpha, beta, speeds=(1.0, -1.0)):
    return SystemSpec.from_triplets(2, speeds, [(1, 1, 2, -alpha / 2), (1, 2, 1, -alpha / 2),
                                                (2, 1, 2, -beta / 2), (2, 2, 1, -beta / 2)])


@pytest.fixture
def tartar_spec():
    return SystemSpec.from_triplets(2, [1.0, -1.0], TARTAR_TRIPLETS)


@pytest.fixture
def small_hats():
    return [InitialDatum.hat(0.0, 1.0, 0.25), InitialDatum.hat(0.0, 1.0, 0.25)]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        ok, msg = ACCEPTANCE_LINES[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {msg}")
