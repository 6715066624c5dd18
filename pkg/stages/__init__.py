from .eval_stage import EvalStage
from .score_stage import ScoreStage
from .train_stage import TrainStage

__all__ = ['EvalStage', 'ScoreStage', 'TrainStage']
