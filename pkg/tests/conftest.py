import numpy as np
import pytest

from astskin import _accel
from astskin.dataset import split_holdout
from astskin.simskin import bundled_profile, generate_dataset, profile_from_json


@pytest.fixture(scope="session")
def ast1():
    return bundled_profile("ast1")


@pytest.fixture(scope="session")
def ast1_noiseless(ast1):
    doc = ast1.to_json()
    doc["noise_sigma"] = 0.0
    return profile_from_json(doc)


@pytest.fixture(scope="session")
def calib(ast1):
    return generate_dataset(ast1, 34, 50, 7)


@pytest.fixture(scope="session")
def calib_split(calib):
    return split_holdout(calib, 0.9, 7)


@pytest.fixture(scope="session")
def noiseless_split(ast1_noiseless):
    return split_holdout(generate_dataset(ast1_noiseless, 34, 50, 7), 0.9, 7)


@pytest.fixture(params=_accel.BACKENDS)
def backend(request, monkeypatch):
    """Run a test once per available kernel backend."""
    try:
        impl = _accel.load_backend(request.param)
    except ImportError:
        pytest.skip(f"{request.param} backend not built")
    monkeypatch.setattr(_accel, "best_split", impl.best_split)
    monkeypatch.setattr(_accel, "knn_raw", impl.knn_raw)
    return request.param


def random_features(n, seed):
    return np.random.default_rng(seed).uniform(0.05, 0.3, size=(n, 4))
