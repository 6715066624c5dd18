import hashlib
import logging
from typing import Tuple

from components.scoring.abstract_detector import AbstractDetector
from components.scoring.container import read_file, unpack
from components.scoring.dn2_detector import Dn2Detector
from components.scoring.invariant_detector import NlInvDetector
from components.scoring.maha_detector import MahaDetector
from components.scoring.preprocessing import preprocessing_from
from constants.constants_enum import Method
from entities.entity_config import DetectorConfig
from entities.entity_exception import DataFormatError, InvalidConfigError

logger = logging.getLogger(__name__)


def _detector_class(method: Method):
    if method.is_invariant:
        return NlInvDetector
    if method is Method.MAHAAD:
        return MahaDetector
    if method is Method.DN2:
        return Dn2Detector
    raise InvalidConfigError(f"No detector for method {method.value}")


def build_detector(config: DetectorConfig, progress: bool = False) -> AbstractDetector:
    if config.method.is_invariant:
        return NlInvDetector(config, progress=progress)
    return _detector_class(config.method)(config)


def detector_from_bytes(data: bytes, source: str = "<bytes>") -> AbstractDetector:
    header, entries = unpack(data, source)
    try:
        config = DetectorConfig.from_dict(header["config"])
        detector = _detector_class(config.method).from_entries(config, header, entries)
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, InvalidConfigError):
            raise
        raise DataFormatError(f"{source}: malformed detector header ({e!r})")
    detector.preprocessing = preprocessing_from(header, entries)
    return detector


def load_detector(path: str) -> Tuple[AbstractDetector, str]:
    """Detector and the SHA-256 of its file."""
    data = read_file(path)
    detector = detector_from_bytes(data, source=str(path))
    logger.info(f"Loaded {detector.method.value} detector from {path}")
    return detector, hashlib.sha256(data).hexdigest()
