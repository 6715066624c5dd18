import numpy as np
from scipy.stats import rankdata, spearmanr

from entities.entity_exception import InvalidArgumentError, NumericError


def auroc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Area under the ROC curve via the Mann-Whitney U statistic; tied pairs count 1/2.

    Higher scores mean "more OOD"; label 1 marks the outliers.
    """
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel()
    if scores.shape != labels.shape:
        raise InvalidArgumentError(f"{scores.size} scores for {labels.size} labels")
    if not np.all(np.isin(labels, (0, 1))):
        raise InvalidArgumentError("Labels must be 0 or 1")
    n_pos = int(np.count_nonzero(labels == 1))
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise InvalidArgumentError("AUROC needs both inliers (0) and outliers (1)", positives=n_pos, negatives=n_neg)
    if not np.all(np.isfinite(scores)):
        raise NumericError("Scores contain non-finite values")

    ranks = rankdata(scores, method="average")
    u_statistic = ranks[labels == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u_statistic / (n_pos * n_neg))


def spearman(a: np.ndarray, b: np.ndarray) -> float:
    """Rank correlation ignoring cells where either value is NaN."""
    result = spearmanr(np.asarray(a, dtype=np.float64).ravel(), np.asarray(b, dtype=np.float64).ravel(),
                       nan_policy="omit")
    return float(result.correlation if hasattr(result, "correlation") else result[0])
