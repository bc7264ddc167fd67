import pytest

from nmkdv import scattering as sc
from nmkdv import spectral as sp
from nmkdv.soliton import soliton_spectral_fixture


@pytest.fixture(scope="session")
def pure_step_2():
    return sp.pure_step_spectral_data(2.0)


@pytest.fixture(scope="session")
def pure_step_2_cache(pure_step_2):
    return sp.build_delta_cache(pure_step_2, -1.0)


@pytest.fixture(scope="session")
def pure_step_1_cache():
    return sp.build_delta_cache(sp.pure_step_spectral_data(1.0), -1.0)


@pytest.fixture(scope="session")
def bump_profile():
    return sc.bump_step(1.0)


@pytest.fixture(scope="session")
def bump_data(bump_profile):
    # the expensive one: ~10 s of Jost integrations
    return sp.build_spectral_data(bump_profile)


@pytest.fixture(scope="session")
def bump_cache(bump_data):
    return sp.build_delta_cache(bump_data, -1.0)


@pytest.fixture(scope="session")
def smooth_data():
    return sp.build_spectral_data(sc.smooth_step(1.0))


@pytest.fixture(scope="session")
def fixture_2():
    return soliton_spectral_fixture(2.0, -1)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
