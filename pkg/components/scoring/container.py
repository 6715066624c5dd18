"""Detector files: an uncompressed zip with fixed entry timestamps, so equal detectors give equal bytes."""
import io
import json
import zipfile
from pathlib import Path
from typing import Any, Dict, Tuple

import numpy as np

from components.data.feature_io import from_bytes, to_bytes
from constants.constants_value import CONTAINER_FORMAT, CONTAINER_VERSION, ZIP_TIMESTAMP
from entities.entity_exception import DataFormatError, MissingDataError
from entities.entity_features import FeatureMatrix
from utils.common import to_builtin

HEADER_ENTRY = "header.json"


def matrix_bytes(values: np.ndarray) -> bytes:
    return to_bytes(FeatureMatrix(np.atleast_2d(np.asarray(values, dtype=np.float64))))


def matrix_from(entries: Dict[str, bytes], name: str) -> np.ndarray:
    if name not in entries:
        raise DataFormatError(f"Detector file has no entry {name!r}")
    return from_bytes(entries[name], source=name).data


def pack(header: Dict[str, Any], entries: Dict[str, bytes]) -> bytes:
    header = {**to_builtin(header), "format": CONTAINER_FORMAT, "version": CONTAINER_VERSION}
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", compression=zipfile.ZIP_STORED) as archive:
        items = [(HEADER_ENTRY, json.dumps(header, sort_keys=True, indent=2).encode("utf-8"))]
        items += sorted(entries.items())
        for name, payload in items:
            info = zipfile.ZipInfo(name, date_time=ZIP_TIMESTAMP)
            info.external_attr = 0o644 << 16
            archive.writestr(info, payload)
    return buffer.getvalue()


def unpack(data: bytes, source: str = "<bytes>") -> Tuple[Dict[str, Any], Dict[str, bytes]]:
    try:
        with zipfile.ZipFile(io.BytesIO(data)) as archive:
            entries = {name: archive.read(name) for name in archive.namelist()}
    except zipfile.BadZipFile as e:
        raise DataFormatError(f"{source}: not a detector file ({e})")
    if HEADER_ENTRY not in entries:
        raise DataFormatError(f"{source}: missing {HEADER_ENTRY}")
    header = json.loads(entries.pop(HEADER_ENTRY).decode("utf-8"))
    if header.get("format") != CONTAINER_FORMAT:
        raise DataFormatError(f"{source}: format {header.get('format')!r} is not {CONTAINER_FORMAT!r}")
    if header.get("version") != CONTAINER_VERSION:
        raise DataFormatError(f"{source}: unsupported container version {header.get('version')}")
    return header, entries


def read_file(path: str) -> bytes:
    path = Path(path)
    if not path.is_file():
        raise MissingDataError(f"Detector file not found: {path}", path=path)
    return path.read_bytes()
