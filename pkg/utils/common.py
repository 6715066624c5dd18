import json
import os
import random
from pathlib import Path
from typing import Any, Optional

import numpy as np
import torch
import yaml
from box import ConfigBox
from box.exceptions import BoxValueError
from ensure import ensure_annotations
from omegaconf import DictConfig, OmegaConf

from constants import CONFIG_FILE_PATH
from constants.constants_value import THREADS_ENV
from entities.entity_exception import InvalidConfigError, MissingDataError
from logs import logger


@ensure_annotations
def read_yaml(path_to_yaml: Path) -> ConfigBox:
    """reads yaml file and returns

    Args:
        path_to_yaml (Path): path like input

    Raises:
        InvalidConfigError: if yaml file is empty

    Returns:
        ConfigBox: ConfigBox type
    """
    try:
        with open(path_to_yaml) as yaml_file:
            content = yaml.safe_load(yaml_file)
            logger.info(f"yaml file: {path_to_yaml} loaded successfully")
            return ConfigBox(content)
    except BoxValueError:
        raise InvalidConfigError(f"yaml file is empty: {path_to_yaml}")


@ensure_annotations
def read_config_file(path: Path) -> ConfigBox:
    """Benchmark files may be JSON or YAML; the suffix decides."""
    if not path.is_file():
        raise MissingDataError(f"Config file not found: {path}", path=path)
    try:
        if path.suffix.lower() in (".yml", ".yaml"):
            return read_yaml(path)
        return load_json(path)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise InvalidConfigError(f"Cannot parse {path}: {e}")


@ensure_annotations
def save_json(path: Path, data: dict):
    """Indented JSON with sorted keys, so equal payloads give equal bytes."""
    with open(path, "w") as f:
        json.dump(to_builtin(data), f, indent=4, sort_keys=True)

    logger.info(f"json file saved at: {path}")


@ensure_annotations
def load_json(path: Path) -> ConfigBox:
    """JSON file as a ConfigBox (attribute access on nested keys)."""
    with open(path) as f:
        content = json.load(f)

    logger.info(f"json file loaded from: {path}")
    return ConfigBox(content)


def resolve_threads() -> int:
    """Worker cap from NLINV_THREADS, defaulting to the CPU count."""
    value = os.environ.get(THREADS_ENV)
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            logger.warning(f"Ignoring non-integer {THREADS_ENV}={value!r}")
    return os.cpu_count() or 1


def configure_threads() -> Optional[int]:
    """Apply NLINV_THREADS to torch's intra-op pool; unset leaves torch's default."""
    if not os.environ.get(THREADS_ENV):
        return None
    threads = resolve_threads()
    torch.set_num_threads(threads)
    logger.debug(f"torch threads capped at {threads}")
    return threads


def seed_everything(seed: int) -> torch.Generator:
    random.seed(seed)
    np.random.seed(seed % (2 ** 32))
    return torch.Generator().manual_seed(seed)


def to_builtin(value: Any) -> Any:
    if isinstance(value, dict):
        return {key: to_builtin(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(item) for item in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def load_training_config(path: Path = CONFIG_FILE_PATH) -> DictConfig:
    """Training, detector, toy and landscape defaults."""
    config = OmegaConf.load(path)
    logger.info(f"training config loaded from: {path}")
    return config
