from .invariant_trainer import fit_affine_scale, select_k, train_scale, training_errors

__all__ = ["fit_affine_scale", "select_k", "train_scale", "training_errors"]
