"""Seeded 2-D toy data: a noisy circle, a 300 degree arc ("U") and uniform box outliers."""
import numpy as np

from constants.constants_enum import ToyShape
from entities.entity_exception import InvalidArgumentError
from entities.entity_features import FeatureMatrix, ShallowSplit

_TOY_COLUMNS = ["x", "y"]


def _check(n: int, noise_sigma: float) -> None:
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    if noise_sigma < 0:
        raise InvalidArgumentError(f"noise sigma must be >= 0, got {noise_sigma}")


def gen_circle(n: int, radius: float = 1.0, noise_sigma: float = 0.05, seed: int = 0) -> FeatureMatrix:
    _check(n, noise_sigma)
    rng = np.random.default_rng(seed)
    angle = rng.uniform(0.0, 2.0 * np.pi, n)
    r = radius + rng.normal(0.0, noise_sigma, n)
    return FeatureMatrix(np.column_stack([r * np.cos(angle), r * np.sin(angle)]), columns=list(_TOY_COLUMNS))


def gen_ushape(n: int, noise_sigma: float = 0.05, seed: int = 0) -> FeatureMatrix:
    _check(n, noise_sigma)
    rng = np.random.default_rng(seed)
    angle = rng.uniform(np.pi / 6.0, 11.0 * np.pi / 6.0, n)
    points = np.column_stack([np.cos(angle), np.sin(angle)]) + rng.normal(0.0, noise_sigma, (n, 2))
    return FeatureMatrix(points, columns=list(_TOY_COLUMNS))


def gen_box_outliers(n: int, half_width: float = 4.0, seed: int = 0) -> FeatureMatrix:
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    if half_width <= 0:
        raise InvalidArgumentError(f"half width must be positive, got {half_width}")
    rng = np.random.default_rng(seed)
    return FeatureMatrix(rng.uniform(-half_width, half_width, (n, 2)), columns=list(_TOY_COLUMNS))


def gen_shape(shape: ToyShape, n: int, noise_sigma: float, seed: int) -> FeatureMatrix:
    if shape is ToyShape.CIRCLE:
        return gen_circle(n, 1.0, noise_sigma, seed)
    return gen_ushape(n, noise_sigma, seed)


def make_toy_split(shape: ToyShape, n_train: int = 1000, n_test: int = 500, noise_sigma: float = 0.05,
                   seed: int = 0, half_width: float = 4.0) -> ShallowSplit:
    """Train on one draw of the shape; test on a fresh draw plus as many box outliers."""
    rng = np.random.default_rng(seed)
    train_seed, inlier_seed, outlier_seed = (int(s) for s in rng.integers(0, 2 ** 31 - 1, 3))
    train = gen_shape(shape, n_train, noise_sigma, train_seed)
    inliers = gen_shape(shape, n_test, noise_sigma, inlier_seed)
    outliers = gen_box_outliers(n_test, half_width, outlier_seed)
    labels = np.concatenate([np.zeros(n_test, np.uint8), np.ones(n_test, np.uint8)])
    test = FeatureMatrix(np.vstack([inliers.data, outliers.data]), labels, list(_TOY_COLUMNS))
    return ShallowSplit(train, test, np.arange(n_train), np.arange(n_train, n_train + 2 * n_test))
