from .dataset_registry import dataset_available, load_registered, load_registry
from .feature_io import (
    BinFeatureLoader, CsvFeatureLoader, MatFeatureLoader, load_bin, load_csv,
    load_features, load_mat, save_bin, save_csv, save_features,
)
from .shallow_split import make_shallow_split
from .standardizer import standardize_apply, standardize_fit, standardize_inverse, unit_normalize
from .toy_generator import gen_box_outliers, gen_circle, gen_shape, gen_ushape, make_toy_split

__all__ = [
    "dataset_available",
    "load_registered",
    "load_registry",
    "BinFeatureLoader",
    "CsvFeatureLoader",
    "MatFeatureLoader",
    "load_bin",
    "load_csv",
    "load_features",
    "load_mat",
    "save_bin",
    "save_csv",
    "save_features",
    "make_shallow_split",
    "standardize_apply",
    "standardize_fit",
    "standardize_inverse",
    "unit_normalize",
    "gen_box_outliers",
    "gen_circle",
    "gen_shape",
    "gen_ushape",
    "make_toy_split",
]
