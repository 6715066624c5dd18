"""Exhaustive nearest-neighbour search and the normalised 2-NN score."""
import logging
from typing import List, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.spatial.distance import cdist

from constants.constants_value import KNN_CHUNK_ROWS, KNN_NEIGHBOURS
from entities.entity_detector import KnnIndex
from entities.entity_exception import DegenerateDataError, InsufficientDataError, InvalidArgumentError
from utils.common import resolve_threads

logger = logging.getLogger(__name__)


def _k_smallest(distances: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """k smallest entries of each row, ties broken by the lower column index."""
    kth = np.partition(distances, k - 1, axis=1)[:, k - 1:k]
    dists = np.empty((distances.shape[0], k))
    index = np.empty((distances.shape[0], k), dtype=np.int64)
    for row, (values, bound) in enumerate(zip(distances, kth)):
        candidates = np.flatnonzero(values <= bound[0])
        order = np.lexsort((candidates, values[candidates]))[:k]
        index[row] = candidates[order]
        dists[row] = values[index[row]]
    return dists, index


def _search_chunk(train: np.ndarray, queries: np.ndarray, k: int, offset: int, exclude_self: bool):
    distances = cdist(queries, train)
    if exclude_self:
        rows = np.arange(queries.shape[0])
        distances[rows, offset + rows] = np.inf
    return _k_smallest(distances, k)


def nearest_neighbours(train: np.ndarray, queries: np.ndarray, k: int,
                       exclude_self: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """Distances and row indices of the k nearest training rows for every query.

    With ``exclude_self`` the queries are the training rows themselves and row i
    never counts as its own neighbour.
    """
    train = np.atleast_2d(np.asarray(train, dtype=np.float64))
    queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    if queries.shape[1] != train.shape[1]:
        raise InvalidArgumentError(f"Query width {queries.shape[1]} does not match training width {train.shape[1]}")
    available = train.shape[0] - (1 if exclude_self else 0)
    if k < 1 or k > available:
        raise InsufficientDataError(f"{k} neighbours requested from {available} candidate rows",
                                    rows=train.shape[0], k=k)
    if exclude_self and queries.shape[0] != train.shape[0]:
        raise InvalidArgumentError("Leave-one-out search needs the training rows as queries")

    starts = list(range(0, queries.shape[0], KNN_CHUNK_ROWS))
    if len(starts) <= 1:
        return _search_chunk(train, queries, k, 0, exclude_self)
    results = Parallel(n_jobs=min(resolve_threads(), len(starts)), prefer="threads")(
        delayed(_search_chunk)(train, queries[s:s + KNN_CHUNK_ROWS], k, s, exclude_self) for s in starts
    )
    return np.vstack([r[0] for r in results]), np.vstack([r[1] for r in results])


def dist_2nn(train: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Mean Euclidean distance to the two nearest training rows."""
    dists, _ = nearest_neighbours(train, queries, KNN_NEIGHBOURS)
    return dists.mean(axis=1)


def loo_mean_2nn(train: np.ndarray) -> float:
    train = np.atleast_2d(np.asarray(train, dtype=np.float64))
    if train.shape[0] < KNN_NEIGHBOURS + 1:
        raise InsufficientDataError(f"Leave-one-out 2-NN needs at least 3 rows, got {train.shape[0]}")
    dists, _ = nearest_neighbours(train, train, KNN_NEIGHBOURS, exclude_self=True)
    mean = float(dists.mean(axis=1).mean())
    if mean <= 0:
        raise DegenerateDataError("Mean leave-one-out 2-NN distance is zero (duplicate rows only)")
    return mean


def build_knn_index(features: Sequence[np.ndarray], ks: Sequence[int]) -> KnnIndex:
    if len(features) != len(ks):
        raise InvalidArgumentError(f"{len(features)} feature scales but {len(ks)} K values")
    stored: List[np.ndarray] = [np.asarray(f, dtype=np.float64) for f in features]
    means = [loo_mean_2nn(f) for f in stored]
    for scale, mean in enumerate(means):
        logger.info(f"scale {scale}: mean leave-one-out 2-NN distance {mean:.6g}")
    return KnnIndex(features=stored, loo_means=means, ks=list(ks))


def s_2nn(index: KnnIndex, scale: int, queries: np.ndarray) -> np.ndarray:
    """K_l * dist_2nn(f) / mean leave-one-out training distance."""
    if not 0 <= scale < index.n_scales:
        raise InvalidArgumentError(f"Scale {scale} out of range for an index with {index.n_scales} scales")
    distances = dist_2nn(index.features[scale], queries)
    return index.ks[scale] * distances / index.loo_means[scale]
