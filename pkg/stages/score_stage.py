from entities.entity_evaluation import BenchmarkJob
from stages.template_node_stage import TemplateNodeStage


class ScoreStage(TemplateNodeStage):
    def process(self, job: BenchmarkJob) -> BenchmarkJob:
        scores = job.detector.score(job.split.test_scales, kinds=[job.score])
        job.scores = scores[job.score.value]
        return job
