import warnings

import pytest
from hypothesis import settings

from agriterrain.core import TerrainClass, VehicleParams
from agriterrain.mapping import build_patches
from agriterrain.sim import synth_mixed_run

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def params():
    return VehicleParams()


@pytest.fixture(scope="session")
def mixed_run():
    """20 s of dirt road followed by 20 s of gravel."""
    return synth_mixed_run([(TerrainClass.DIRT_ROAD, 20.0), (TerrainClass.GRAVEL, 20.0)], seed=11)


@pytest.fixture(scope="session")
def mixed_patches(mixed_run, params):
    series, _ = mixed_run
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_patches(series, params)


def pytest_terminal_summary(terminalreporter):
    from gate import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS.values():
            terminalreporter.write_line(line)
