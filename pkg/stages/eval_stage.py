import logging

from components.evaluation.metrics import auroc
from entities.entity_evaluation import BenchmarkJob
from stages.template_node_stage import TemplateNodeStage

logger = logging.getLogger(__name__)


class EvalStage(TemplateNodeStage):
    def process(self, job: BenchmarkJob) -> BenchmarkJob:
        job.auc = auroc(job.scores, job.split.test.labels)
        job.detector = None
        logger.info(f"seed {job.seed}: {job.score.value} AUC {job.auc:.4f}")
        return job
