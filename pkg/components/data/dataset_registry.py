import logging
import os
from pathlib import Path
from typing import Optional

import numpy as np
from box import ConfigBox

from components.data.feature_io import load_features
from constants import DATASETS_FILE_PATH, PROJECT_ROOT
from constants.constants_value import DATA_DIR_ENV
from entities.entity_exception import DataFormatError, InvalidArgumentError, MissingDataError
from entities.entity_features import FeatureMatrix
from utils.common import load_json

logger = logging.getLogger(__name__)


def load_registry(path: Optional[Path] = None) -> ConfigBox:
    return load_json(Path(path or DATASETS_FILE_PATH)).datasets


def dataset_path(name: str, registry: Optional[ConfigBox] = None) -> Path:
    registry = registry if registry is not None else load_registry()
    if name not in registry:
        raise InvalidArgumentError(f"Unknown dataset {name!r}", known=sorted(registry))
    root = Path(os.environ.get(DATA_DIR_ENV, PROJECT_ROOT))
    return root / registry[name].path


def dataset_available(name: str, registry: Optional[ConfigBox] = None) -> bool:
    return dataset_path(name, registry).is_file()


def load_registered(name: str, registry: Optional[ConfigBox] = None) -> FeatureMatrix:
    """Load a labelled registry dataset and check it against the documented shape."""
    registry = registry if registry is not None else load_registry()
    path = dataset_path(name, registry)
    if not path.is_file():
        raise MissingDataError(f"Dataset {name!r} not found at {path}", dataset=name, path=path)
    entry = registry[name]
    matrix = load_features(str(path), has_labels=True)
    if matrix.n_cols != entry.cols:
        raise DataFormatError(f"{name}: expected {entry.cols} feature columns, got {matrix.n_cols}")
    inliers = int(np.sum(matrix.labels == 0))
    outliers = int(np.sum(matrix.labels == 1))
    if (inliers, outliers) != (entry.inliers, entry.outliers):
        logger.warning(f"{name}: {inliers} inliers / {outliers} outliers, "
                       f"documented {entry.inliers} / {entry.outliers}")
    return matrix
