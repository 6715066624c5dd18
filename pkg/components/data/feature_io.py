import logging
import os
import struct
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
import scipy.io

from components.data.abstract_feature_loader import AbstractFeatureLoader
from constants.constants_value import MATRIX_MAGIC
from entities.entity_exception import DataFormatError, InvalidArgumentError, MissingDataError
from entities.entity_features import FeatureMatrix

logger = logging.getLogger(__name__)

_MATRIX_HEADER = struct.Struct("<IIB")


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except (TypeError, ValueError):
        return False


def _require_file(path: str) -> None:
    if not os.path.isfile(path):
        raise MissingDataError(f"Feature file not found: {path}", path=path)


def _split_labels(values: np.ndarray, columns: List[str], has_labels: bool, path: str):
    if not has_labels:
        return values, None, columns
    if values.shape[1] < 2:
        raise DataFormatError(f"{path}: a label column needs at least one feature column beside it")
    labels = values[:, -1]
    if not np.all(np.isin(labels, (0.0, 1.0))):
        bad = int(np.flatnonzero(~np.isin(labels, (0.0, 1.0)))[0])
        raise DataFormatError(f"{path}: label {labels[bad]} in row {bad} is not 0 or 1", row=bad)
    return values[:, :-1], labels.astype(np.uint8), columns[:-1]


class CsvFeatureLoader(AbstractFeatureLoader):
    """Rectangular numeric CSV. A first row with any non-numeric cell is taken as the header."""
    suffixes = (".csv", ".txt")

    def load(self, path: str, has_labels: bool = False) -> FeatureMatrix:
        _require_file(path)
        try:
            frame = pd.read_csv(path, header=None, dtype=str, skip_blank_lines=True,
                                keep_default_na=False, comment="#")
        except pd.errors.ParserError as e:
            raise DataFormatError(f"{path}: ragged rows ({e})", path=path)
        except pd.errors.EmptyDataError:
            raise DataFormatError(f"{path}: empty file", path=path)

        header_rows = 0
        columns = [f"f{i}" for i in range(frame.shape[1])]
        if frame.shape[0] > 0 and not all(_is_number(cell) for cell in frame.iloc[0]):
            columns = [str(cell).strip() for cell in frame.iloc[0]]
            frame = frame.iloc[1:]
            header_rows = 1
            logger.info(f"{path}: header row detected ({', '.join(columns)})")

        numeric = frame.apply(pd.to_numeric, errors="coerce")
        bad = np.argwhere(numeric.isna().to_numpy() | (frame.to_numpy() == ""))
        if bad.size:
            row, col = (int(v) for v in bad[0])
            raise DataFormatError(
                f"{path}: line {row + header_rows + 1}, column {col + 1}: "
                f"{frame.iat[row, col]!r} is missing or not numeric",
                line=row + header_rows + 1, column=col + 1,
            )

        values = frame.to_numpy(dtype=str).astype(np.float64) if len(frame) else np.zeros((0, frame.shape[1]))
        data, labels, columns = _split_labels(values, columns, has_labels, path)
        logger.info(f"Loaded {path}: {data.shape[0]} x {data.shape[1]}{' with labels' if labels is not None else ''}")
        return FeatureMatrix(data, labels, columns)

    def save(self, matrix: FeatureMatrix, path: str) -> str:
        frame = pd.DataFrame(matrix.data, columns=matrix.columns)
        if matrix.has_labels:
            frame["label"] = matrix.labels.astype(int)
        frame.to_csv(path, index=False, float_format="%.17g")
        return str(path)


class BinFeatureLoader(AbstractFeatureLoader):
    """NLFM1: magic, u32 rows, u32 cols, u8 has_labels, f64 LE row-major data, u8 labels."""
    suffixes = (".bin", ".nlfm")

    def load(self, path: str, has_labels: bool = False) -> FeatureMatrix:
        _require_file(path)
        return from_bytes(Path(path).read_bytes(), source=str(path))

    def save(self, matrix: FeatureMatrix, path: str) -> str:
        Path(path).write_bytes(to_bytes(matrix))
        return str(path)


class MatFeatureLoader(AbstractFeatureLoader):
    """ODDS-style MATLAB files with an ``X`` matrix and an optional ``y`` label vector."""
    suffixes = (".mat",)

    def load(self, path: str, has_labels: bool = False) -> FeatureMatrix:
        _require_file(path)
        content = scipy.io.loadmat(path)
        if "X" not in content:
            raise DataFormatError(f"{path}: no 'X' variable", path=path)
        data = np.asarray(content["X"], dtype=np.float64)
        labels = None
        if has_labels:
            if "y" not in content:
                raise DataFormatError(f"{path}: labels requested but no 'y' variable", path=path)
            labels = np.asarray(content["y"]).ravel().astype(np.float64)
            if not np.all(np.isin(labels, (0.0, 1.0))):
                raise DataFormatError(f"{path}: labels must be 0 or 1", path=path)
            labels = labels.astype(np.uint8)
        return FeatureMatrix(data, labels)

    def save(self, matrix: FeatureMatrix, path: str) -> str:
        content: Dict[str, np.ndarray] = {"X": matrix.data}
        if matrix.has_labels:
            content["y"] = matrix.labels.reshape(-1, 1).astype(np.float64)
        scipy.io.savemat(path, content)
        return str(path)


def to_bytes(matrix: FeatureMatrix) -> bytes:
    payload = MATRIX_MAGIC + _MATRIX_HEADER.pack(matrix.n_rows, matrix.n_cols, int(matrix.has_labels))
    payload += matrix.data.astype("<f8").tobytes()
    if matrix.has_labels:
        payload += matrix.labels.astype(np.uint8).tobytes()
    return payload


def from_bytes(data: bytes, source: str = "<bytes>") -> FeatureMatrix:
    if data[:len(MATRIX_MAGIC)] != MATRIX_MAGIC:
        raise DataFormatError(
            f"{source}: bad matrix magic, expected {MATRIX_MAGIC!r}, got {bytes(data[:len(MATRIX_MAGIC)])!r}")
    offset = len(MATRIX_MAGIC)
    if len(data) < offset + _MATRIX_HEADER.size:
        raise DataFormatError(f"{source}: truncated header")
    rows, cols, has_labels = _MATRIX_HEADER.unpack_from(data, offset)
    offset += _MATRIX_HEADER.size
    expected = offset + rows * cols * 8 + (rows if has_labels else 0)
    if len(data) != expected:
        raise DataFormatError(f"{source}: size {len(data)} does not match header ({expected} bytes)",
                              rows=rows, cols=cols)
    values = np.frombuffer(data, dtype="<f8", count=rows * cols, offset=offset).astype(np.float64)
    offset += rows * cols * 8
    labels = np.frombuffer(data, dtype=np.uint8, count=rows, offset=offset).copy() if has_labels else None
    return FeatureMatrix(values.reshape(rows, cols), labels)


_LOADERS: List[AbstractFeatureLoader] = [CsvFeatureLoader(), BinFeatureLoader(), MatFeatureLoader()]


def loader_for(path: str) -> AbstractFeatureLoader:
    suffix = Path(path).suffix.lower()
    for loader in _LOADERS:
        if suffix in loader.suffixes:
            return loader
    raise InvalidArgumentError(f"Unsupported feature file type {suffix!r} for {path}")


def load_csv(path: str, has_label_column: bool = False) -> FeatureMatrix:
    return CsvFeatureLoader().load(path, has_label_column)


def save_csv(matrix: FeatureMatrix, path: str) -> str:
    return CsvFeatureLoader().save(matrix, path)


def load_bin(path: str) -> FeatureMatrix:
    return BinFeatureLoader().load(path)


def save_bin(matrix: FeatureMatrix, path: str) -> str:
    return BinFeatureLoader().save(matrix, path)


def load_mat(path: str, has_labels: bool = True) -> FeatureMatrix:
    return MatFeatureLoader().load(path, has_labels)


def load_features(path: str, has_labels: bool = False) -> FeatureMatrix:
    """Dispatch on the file suffix; binary files carry their own label flag."""
    return loader_for(str(path)).load(str(path), has_labels)


def save_features(matrix: FeatureMatrix, path: str) -> str:
    return loader_for(str(path)).save(matrix, str(path))


def require_labels(matrix: FeatureMatrix, path: Optional[str] = None) -> FeatureMatrix:
    if not matrix.has_labels:
        raise DataFormatError(f"{path or 'feature matrix'} has no label column")
    return matrix
