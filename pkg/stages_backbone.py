import logging
from typing import Any, List

from entities.entity_exception import NlinvError
from stages.template_node_stage import TemplateNodeStage

logger = logging.getLogger(__name__)


class StageBackbone:
    """Runs stages as a chain: outputs of stage i become inputs of stage i + 1."""
    def __init__(self):
        self.stages: List[TemplateNodeStage] = []
        self.results: List[Any] = []
        self.errors: List[NlinvError] = []

    def add_stage(self, stage: TemplateNodeStage):
        self.stages.append(stage)

    def remove_stage(self, stage: TemplateNodeStage):
        self.stages.remove(stage)

    def submit(self, job: Any) -> None:
        self.stages[0].add_input(job)

    def loop_stage(self):
        for idx, stage in enumerate(self.stages):
            stage.loop()
            self._handle_exceptions(stage)
            output = stage.get_output()
            while output is not None:
                if idx + 1 < len(self.stages):
                    self.stages[idx + 1].add_input(output)
                else:
                    self.results.append(output)
                output = stage.get_output()

    @property
    def is_idle(self) -> bool:
        return all(stage.is_idle for stage in self.stages)

    def run(self, context: dict = None) -> List[Any]:
        """Loop until every stage is idle; re-raise the first failure with ``context``."""
        while not self.is_idle:
            self.loop_stage()
        if self.errors:
            error = self.errors[0]
            error.context.update(context or {})
            raise error
        results, self.results = self.results, []
        return results

    def _handle_exceptions(self, stage: TemplateNodeStage) -> None:
        data = stage.get_exception_data()
        while data is not None:
            job, exception = data
            if not isinstance(exception, NlinvError):
                wrapped = NlinvError(f"{stage.name}: {exception}")
                wrapped.__cause__ = exception
                exception = wrapped
            exception.context.setdefault("stage", stage.name)
            exception.context.setdefault("seed", getattr(job, "seed", None))
            self.errors.append(exception)
            stage.notify_exception_data_handled()
            data = stage.get_exception_data()
        if self.errors:
            for other in self.stages:
                other.request_stop()
