# tests/conftest.py
import copy

import numpy as np
import pytest

from core.transform import ALGEBRAIC, MATERN, DecaySpec

TINY_CONFIG = {
    "problem": "helmholtz",
    "physics": {"kappa": 1.0},
    "decay": {"family": "matern", "J": 3, "theta": 0.1, "nu": 0.5, "l": 0.1},
    "mesh": {"n": 2},
    "sampling": {
        "train": {"count": 8, "skip": 0},
        "test": {"count": 3, "seed": 1},
    },
    "pod": {"centered": True, "L": 2},
    "nn": {
        "D": 2,
        "H": 6,
        "L_list": [0, 1, 2],
        "train": {"learning_rate": 5e-4, "epochs": 50, "seed": 0},
    },
    "bench": {"queries": 3, "L": 2, "seed": 7},
}


@pytest.fixture
def algebraic_spec():
    return DecaySpec(family=ALGEBRAIC, J=4, theta=0.1, r=2.0)


@pytest.fixture
def matern_spec():
    return DecaySpec(family=MATERN, J=5, theta=0.1, nu=0.5, l=0.1)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(1234))


@pytest.fixture
def tiny_config_dict(tmp_path):
    data = copy.deepcopy(TINY_CONFIG)
    data["output_dir"] = str(tmp_path / "run")
    return data


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
