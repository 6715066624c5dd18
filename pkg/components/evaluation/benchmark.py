import logging
import time
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Union

import numpy as np
import pandas as pd

from components.data import load_features, load_registered, make_shallow_split, make_toy_split
from components.data.feature_io import require_labels
from entities.entity_config import BenchmarkConfig, DatasetRef, DetectorConfig
from entities.entity_exception import DataFormatError
from entities.entity_evaluation import BenchmarkJob, BenchmarkReport
from entities.entity_features import FeatureMatrix, ShallowSplit
from stages.eval_stage import EvalStage
from stages.score_stage import ScoreStage
from stages.train_stage import TrainStage
from stages_backbone import StageBackbone
from utils.common import save_json

logger = logging.getLogger(__name__)


class SplitResolver:
    """Train/test split of a dataset reference for a given seed; files are read once."""

    def __init__(self, dataset: DatasetRef):
        self.dataset = dataset
        self._cache: Dict[str, Union[FeatureMatrix, List[FeatureMatrix]]] = {}

    def _full(self) -> FeatureMatrix:
        if "full" not in self._cache:
            self._cache["full"] = load_registered(self.dataset.name)
        return self._cache["full"]

    def _presplit(self) -> ShallowSplit:
        if "train" not in self._cache:
            paths = self.dataset.test_paths
            test = [require_labels(load_features(path, has_labels=True), path) for path in paths]
            for path, matrix in zip(paths[1:], test[1:]):
                if not np.array_equal(matrix.labels, test[0].labels):
                    raise DataFormatError(f"{path}: labels disagree with {paths[0]}", path=path)
            self._cache["train"] = [load_features(path, has_labels=False) for path in self.dataset.train_paths]
            self._cache["test"] = test
        train, test = self._cache["train"], self._cache["test"]
        return ShallowSplit(train[0].without_labels(), test[0], None, None,
                            extra_train=[m.without_labels() for m in train[1:]], extra_test=test[1:])

    def split(self, seed: int) -> ShallowSplit:
        if self.dataset.name is not None:
            return make_shallow_split(self._full(), seed)
        if self.dataset.toy is not None:
            return make_toy_split(self.dataset.toy, self.dataset.n, self.dataset.n_test,
                                  self.dataset.noise, seed, self.dataset.half_width)
        return self._presplit()


def seeded_detector_config(config: DetectorConfig, seed: int) -> DetectorConfig:
    return replace(config, scale=replace(config.scale, seed=seed))


def run_benchmark(cfg: BenchmarkConfig, progress: bool = False) -> BenchmarkReport:
    """Train, score and evaluate once per seed; AUC mean and std over the seeds."""
    started = time.perf_counter()
    resolver = SplitResolver(cfg.dataset)
    backbone = StageBackbone()
    backbone.add_stage(TrainStage(progress=progress))
    backbone.add_stage(ScoreStage())
    backbone.add_stage(EvalStage())

    logger.info(f"Benchmark {cfg.name}: seeds {cfg.seeds}")
    for seed in cfg.seeds:
        backbone.submit(BenchmarkJob(seed=seed, split=resolver.split(seed),
                                     detector_config=seeded_detector_config(cfg.detector, seed), score=cfg.score))
    jobs: List[BenchmarkJob] = backbone.run(context={"dataset": cfg.dataset.label, "method": cfg.method.value})

    report = BenchmarkReport(config=cfg.to_dict(), per_seed=[job.result() for job in sorted(jobs, key=lambda j: j.seed)],
                             wall_time_s=time.perf_counter() - started)
    logger.info(f"{cfg.name}: AUC {report.mean:.4f} +- {report.std:.4f} over {len(report.per_seed)} seeds")
    if cfg.output:
        write_report(report, cfg.output)
    return report


def write_report(report: BenchmarkReport, output: str) -> None:
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_json(path.with_suffix(".json"), report.to_dict())
    frame = pd.DataFrame([{"seed": r.seed, "auc": r.auc, "model_hash": r.model_hash} for r in report.per_seed])
    frame.to_csv(path.with_suffix(".csv"), index=False, float_format="%.17g")
