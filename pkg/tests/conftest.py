import math
import os

import pytest

from stochinv import Grid, Instance, load_instance, pmf_parametric, solve

INSTANCE_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "instances")


def instance_path(name):
    return os.path.join(INSTANCE_DIR, name)


def seasonal_instance(B):
    """Four-period seasonal Poisson demand, the main worked fixture."""
    rates = (20.0, 40.0, 60.0, 40.0)
    return Instance(horizon=4, K=100.0, v=0.0, h=1.0, p=10.0, B=B,
                    demands=tuple(pmf_parametric("poisson", r) for r in rates))


@pytest.fixture(scope="session")
def seasonal_tables():
    """Solved seasonal fixture for each capacity of interest."""
    grid = Grid(-300, 600)
    return {B: solve(seasonal_instance(B), grid)
            for B in (35, 65, 71, math.inf)}


@pytest.fixture(scope="session")
def spiky_instance():
    return load_instance(instance_path("spiky_nonstationary.json"))


@pytest.fixture(scope="session")
def spiky_tables(spiky_instance):
    return solve(spiky_instance, Grid(-1000, 1100))


@pytest.fixture(scope="session")
def lumpy_instance():
    return load_instance(instance_path("lumpy_discounted.json"))


@pytest.fixture(scope="session")
def lumpy_tables(lumpy_instance):
    return solve(lumpy_instance, Grid(-200, 400))


@pytest.fixture(scope="session")
def volatile_instance():
    return load_instance(instance_path("volatile_poisson.json"))


@pytest.fixture(scope="session")
def volatile_tables(volatile_instance):
    return solve(volatile_instance, Grid(-1200, 600))
