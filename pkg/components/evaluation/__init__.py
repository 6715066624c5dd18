from .benchmark import run_benchmark, write_report
from .landscape import landscape, save_landscape
from .metrics import auroc, spearman

__all__ = ["run_benchmark", "write_report", "landscape", "save_landscape", "auroc", "spearman"]
