import numpy as np
import pytest

from handsynth import GenerationConfig, generate_dataset, make_toy_assets


@pytest.fixture(scope="session")
def toy():
    pack, model = make_toy_assets(0)
    return pack, model


@pytest.fixture(scope="session")
def toy_pack(toy):
    return toy[0]


@pytest.fixture(scope="session")
def toy_model(toy):
    return toy[1]


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    """3-scene single-branch dataset shared by io/metrics/cli tests."""
    out = str(tmp_path_factory.mktemp("ds") / "small")
    generate_dataset(GenerationConfig(out_dir=out, n_scenes=3, seed=42))
    return out


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
