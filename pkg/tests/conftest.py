from pathlib import Path

import pytest

from ifestates import SpinStarParams, build_spin_star

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR


@pytest.fixture(scope="session")
def star_params_n2():
    return SpinStarParams(2, 1.0, 0.7, (3.0, 4.0))


@pytest.fixture(scope="session")
def star_system_n2(star_params_n2):
    return build_spin_star(star_params_n2)
