from .abstract_detector import AbstractDetector
from .detector_factory import build_detector, detector_from_bytes, load_detector
from .dn2_detector import Dn2Detector, dn2_score
from .invariant_detector import (
    NlInvDetector, final_score, invariant_score, invariant_score_scale, two_nn_score,
)
from .knn_index import build_knn_index, dist_2nn, loo_mean_2nn, nearest_neighbours, s_2nn
from .maha_detector import MahaDetector, fit_maha, maha_score

__all__ = [
    "AbstractDetector",
    "build_detector",
    "detector_from_bytes",
    "load_detector",
    "Dn2Detector",
    "dn2_score",
    "NlInvDetector",
    "final_score",
    "invariant_score",
    "invariant_score_scale",
    "two_nn_score",
    "build_knn_index",
    "dist_2nn",
    "loo_mean_2nn",
    "nearest_neighbours",
    "s_2nn",
    "MahaDetector",
    "fit_maha",
    "maha_score",
]
