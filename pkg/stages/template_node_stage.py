import logging
from abc import ABC, abstractmethod
from collections import deque
from typing import Any, Deque, Optional, Tuple

from constants.constants_enum import StageStatus

logger = logging.getLogger(__name__)


class TemplateNodeStage(ABC):
    """Queue-driven pipeline node: jobs enter on the input deque, leave on the output deque.

    Failures are parked on the exception deque as (job, exception) until the
    backbone handles them.
    """
    def __init__(self):
        self.status_handlers = {
            StageStatus.Wait: self.wait,
            StageStatus.Execute: self.execute,
            StageStatus.Stop: self.stop,
            StageStatus.Error: self.error
        }
        self.status = StageStatus.Wait
        self._input_deque: Deque[Any] = deque()
        self._output_deque: Deque[Any] = deque()
        self._exception_deque: Deque[Tuple[Any, Exception]] = deque()
        self._stop_requested = False

    @property
    def name(self) -> str:
        return type(self).__name__

    @property
    def is_idle(self) -> bool:
        return (self.status in (StageStatus.Wait, StageStatus.Stop)
                and not self._input_deque and not self._exception_deque)

    def add_input(self, job: Any) -> None:
        self._input_deque.append(job)

    def get_output(self) -> Optional[Any]:
        if len(self._output_deque) == 0:
            return None
        return self._output_deque.popleft()

    def get_exception_data(self) -> Optional[Tuple[Any, Exception]]:
        if len(self._exception_deque) == 0:
            return None
        return self._exception_deque[0]

    def notify_exception_data_handled(self) -> None:
        self._exception_deque.popleft()

    def request_stop(self) -> None:
        self._stop_requested = True

    def wait(self) -> None:
        if len(self._exception_deque) != 0:
            self.status = StageStatus.Error
            return
        if self._stop_requested:
            self.status = StageStatus.Stop
            return
        if len(self._input_deque) > 0:
            self.status = StageStatus.Execute

    def execute(self) -> None:
        if len(self._exception_deque) != 0:
            self.status = StageStatus.Error
            return
        if self._stop_requested:
            self.status = StageStatus.Stop
            return
        if len(self._input_deque) == 0:
            self.status = StageStatus.Wait
            return

        job = self._input_deque.popleft()
        try:
            self._output_deque.append(self.process(job))
        except Exception as e:
            logger.error(f"{self.name} failed: {e}")
            self._exception_deque.append((job, e))

    def stop(self) -> None:
        if not self._stop_requested:
            self.status = StageStatus.Wait
            return
        self._input_deque.clear()

    def error(self) -> None:
        if len(self._exception_deque) == 0:
            self.status = StageStatus.Wait

    def loop(self) -> None:
        handler = self.status_handlers.get(self.status, lambda: logger.warning("Unknown status"))
        handler()

    @abstractmethod
    def process(self, job: Any) -> Any:
        pass
