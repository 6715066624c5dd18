import logging

from components.scoring import build_detector
from entities.entity_evaluation import BenchmarkJob
from stages.template_node_stage import TemplateNodeStage

logger = logging.getLogger(__name__)


class TrainStage(TemplateNodeStage):
    def __init__(self, progress: bool = False):
        super().__init__()
        self.progress = progress

    def process(self, job: BenchmarkJob) -> BenchmarkJob:
        detector = build_detector(job.detector_config, progress=self.progress)
        detector.fit(job.split.train_scales, kinds=[job.score])
        job.detector = detector
        job.model_hash = detector.model_hash()
        logger.info(f"seed {job.seed}: trained {job.detector_config.method.value} ({job.model_hash[:12]})")
        return job
