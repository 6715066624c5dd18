import logging

import numpy as np

from entities.entity_exception import InsufficientDataError, InvalidArgumentError
from entities.entity_features import FeatureMatrix, ShallowSplit

logger = logging.getLogger(__name__)


def make_shallow_split(full: FeatureMatrix, seed: int) -> ShallowSplit:
    """All outliers plus an equal, seeded sample of inliers form the test set; remaining inliers train."""
    if not full.has_labels:
        raise InvalidArgumentError("A shallow split needs labelled data")
    inliers = np.flatnonzero(full.labels == 0)
    outliers = np.flatnonzero(full.labels == 1)
    if outliers.size == 0:
        raise InvalidArgumentError("Dataset has no outliers (label 1)")
    if inliers.size < outliers.size + 2:
        raise InsufficientDataError(
            f"{inliers.size} inliers cannot cover {outliers.size} test inliers and a training set of 2",
            inliers=inliers.size, outliers=outliers.size)
    if inliers.size < 2 * outliers.size:
        logger.warning(f"Only {inliers.size} inliers for {outliers.size} outliers; "
                       f"training keeps {inliers.size - outliers.size}")

    rng = np.random.default_rng(seed)
    test_inliers = np.sort(rng.choice(inliers, size=outliers.size, replace=False))
    train_index = np.setdiff1d(inliers, test_inliers, assume_unique=True)
    test_index = np.concatenate([test_inliers, outliers])

    train = full.take(train_index).without_labels()
    test = full.take(test_index)
    logger.info(f"Split seed {seed}: train {train.n_rows}, test {test_inliers.size}+{outliers.size}")
    return ShallowSplit(train, test, train_index, test_index)
