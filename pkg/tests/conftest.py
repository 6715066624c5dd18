import numpy as np
import pytest
import torch

from components.data import save_csv
from constants.constants_enum import Method
from entities.entity_config import DetectorConfig, ScaleConfig
from entities.entity_features import FeatureMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def fast_scale():
    return ScaleConfig(epochs=2, batch_size=32, seed=0)


@pytest.fixture
def fast_config(fast_scale):
    return DetectorConfig(method=Method.NLINVS, scale=fast_scale)


def randomize_rotations(model: torch.nn.Module, seed: int, scale: float = 0.5) -> torch.nn.Module:
    generator = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        for name, param in model.named_parameters():
            if name.endswith((".v", ".bias")):
                param.copy_(torch.randn(param.shape, generator=generator, dtype=torch.float64) * scale)
    return model


def gaussian_blob(rng, n: int, dim: int) -> np.ndarray:
    mixing = rng.normal(size=(dim, dim))
    return rng.normal(size=(n, dim)) @ mixing + rng.normal(size=dim)


@pytest.fixture
def labelled_csvs(tmp_path):
    rng = np.random.default_rng(7)
    spread = np.array([1.0, 2.0, 0.5, 1.0])
    train = rng.normal(size=(120, 4)) * spread
    test_in = rng.normal(size=(20, 4)) * spread
    test_out = test_in[:10] + 6.0
    train_path = tmp_path / "train.csv"
    test_path = tmp_path / "test.csv"
    save_csv(FeatureMatrix(train), str(train_path))
    labels = np.concatenate([np.zeros(20), np.ones(10)])
    save_csv(FeatureMatrix(np.vstack([test_in, test_out]), labels), str(test_path))
    return train_path, test_path
