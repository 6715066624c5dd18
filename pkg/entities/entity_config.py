from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional, Union

from constants.constants_enum import Method, ScoreKind, ToyShape
from constants.constants_value import (
    DEFAULT_BATCH_SIZE, DEFAULT_DN2_K, DEFAULT_EPOCHS, DEFAULT_LR_END,
    DEFAULT_LR_START, DEFAULT_N_BLOCKS, DEFAULT_P_PERCENT,
)
from entities.entity_exception import InvalidArgumentError, InvalidConfigError

ALLOWED_SCORES = {
    Method.NLINVS: (ScoreKind.S_FINAL, ScoreKind.S_INV, ScoreKind.S_2NN),
    Method.NLINVS_NO_BWD: (ScoreKind.S_INV, ScoreKind.S_FINAL),
    Method.LINEAR_INVARIANTS: (ScoreKind.S_INV, ScoreKind.S_FINAL, ScoreKind.S_2NN),
    Method.MAHAAD: (ScoreKind.S_MAHA,),
    Method.DN2: (ScoreKind.S_DN2,),
}


@dataclass
class ScaleConfig:
    p_percent: float = DEFAULT_P_PERCENT
    epochs: int = DEFAULT_EPOCHS
    batch_size: int = DEFAULT_BATCH_SIZE
    lr_start: float = DEFAULT_LR_START
    lr_end: float = DEFAULT_LR_END
    seed: int = 0
    n_blocks: int = DEFAULT_N_BLOCKS
    hidden_width: Optional[int] = None
    k: Optional[int] = None
    backward_loss: bool = True

    def __post_init__(self):
        if not 0 < self.p_percent < 100:
            raise InvalidArgumentError(f"p must lie in (0, 100), got {self.p_percent}")
        if self.epochs < 1:
            raise InvalidArgumentError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise InvalidArgumentError(f"batch size must be >= 1, got {self.batch_size}")
        if self.lr_start <= 0 or self.lr_end <= 0:
            raise InvalidArgumentError("learning rates must be positive")
        if self.n_blocks < 0:
            raise InvalidArgumentError(f"n_blocks must be >= 0, got {self.n_blocks}")
        if self.hidden_width is not None and self.hidden_width < 1:
            raise InvalidArgumentError(f"hidden width must be >= 1, got {self.hidden_width}")
        if self.k is not None and self.k < 1:
            raise InvalidArgumentError(f"K must be >= 1, got {self.k}")

    def learning_rate(self, epoch: int) -> float:
        """Per-epoch linear interpolation from lr_start to lr_end."""
        if self.epochs == 1:
            return self.lr_start
        return self.lr_start + (self.lr_end - self.lr_start) * epoch / (self.epochs - 1)


@dataclass
class DetectorConfig:
    method: Method = Method.NLINVS
    scale: ScaleConfig = field(default_factory=ScaleConfig)
    standardize: bool = True
    unit_norm_last: bool = False
    dn2_k: int = DEFAULT_DN2_K

    def __post_init__(self):
        if self.dn2_k < 1:
            raise InvalidArgumentError(f"DN2 k must be >= 1, got {self.dn2_k}")
        if self.method is Method.NLINVS_NO_BWD:
            self.scale = replace(self.scale, backward_loss=False)

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["method"] = self.method.value
        return payload

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "DetectorConfig":
        payload = dict(payload)
        scale = ScaleConfig(**dict(payload.pop("scale", {})))
        method = Method(payload.pop("method", Method.NLINVS.value))
        return cls(method=method, scale=scale, **payload)


@dataclass
class DatasetRef:
    name: Optional[str] = None
    train: Optional[Union[str, List[str]]] = None
    test: Optional[Union[str, List[str]]] = None
    toy: Optional[ToyShape] = None
    n: int = 1000
    noise: float = 0.05
    n_test: int = 500
    half_width: float = 4.0

    def __post_init__(self):
        chosen = sum(x is not None for x in (self.name, self.train, self.toy))
        if chosen != 1:
            raise InvalidConfigError("A dataset needs exactly one of 'name', 'train'/'test' or 'toy'")
        if (self.train is None) != (self.test is None):
            raise InvalidConfigError("Pre-split datasets need both 'train' and 'test'")
        if self.train is not None:
            # one file per scale
            self.train = [str(p) for p in self.train] if isinstance(self.train, (list, tuple)) else str(self.train)
            self.test = [str(p) for p in self.test] if isinstance(self.test, (list, tuple)) else str(self.test)
            if not self.train_paths or len(self.train_paths) != len(self.test_paths):
                raise InvalidConfigError("Pre-split datasets need one train and one test file per scale",
                                         train=self.train_paths, test=self.test_paths)

    @property
    def train_paths(self) -> List[str]:
        return [] if self.train is None else [self.train] if isinstance(self.train, str) else list(self.train)

    @property
    def test_paths(self) -> List[str]:
        return [] if self.test is None else [self.test] if isinstance(self.test, str) else list(self.test)

    @property
    def label(self) -> str:
        if self.name is not None:
            return self.name
        if self.toy is not None:
            return f"toy-{self.toy.value}"
        return f"{'+'.join(self.train_paths)}|{'+'.join(self.test_paths)}"

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["toy"] = None if self.toy is None else self.toy.value
        return payload


@dataclass
class BenchmarkConfig:
    dataset: DatasetRef
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    score: Optional[ScoreKind] = None
    seeds: List[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    output: Optional[str] = None
    name: Optional[str] = None

    def __post_init__(self):
        allowed = ALLOWED_SCORES[self.detector.method]
        if self.score is None:
            self.score = allowed[0]
        if self.score not in allowed:
            raise InvalidConfigError(
                f"Score {self.score.value} is not defined for method {self.detector.method.value}",
                allowed=[kind.value for kind in allowed],
            )
        if not self.seeds:
            raise InvalidConfigError("A benchmark needs at least one seed")
        if self.name is None:
            self.name = f"{self.dataset.label}:{self.detector.method.value}:{self.score.value}"

    @property
    def method(self) -> Method:
        return self.detector.method

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "dataset": self.dataset.to_dict(),
            "detector": self.detector.to_dict(),
            "score": self.score.value,
            "seeds": list(self.seeds),
            "output": self.output,
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> List["BenchmarkConfig"]:
        """Expand one benchmark entry; a ``p_values`` list yields one config per p."""
        payload = dict(payload)
        dataset = dict(payload.pop("dataset"))
        if dataset.get("toy") is not None:
            dataset["toy"] = ToyShape(dataset["toy"])
        detector = dict(payload.pop("detector", {}))
        if "method" in payload:
            detector["method"] = payload.pop("method")
        score = payload.pop("score", None)
        p_values = payload.pop("p_values", None)
        configs = []
        for p in (p_values or [None]):
            scale = dict(detector.get("scale", {}))
            if p is not None:
                scale["p_percent"] = p
            resolved = DetectorConfig.from_dict({**detector, "scale": scale})
            name = payload.get("name")
            output = payload.get("output")
            if p is not None:
                if name is not None:
                    name = f"{name}:p={p}"
                if output is not None:
                    stem, dot, suffix = output.rpartition(".")
                    output = f"{stem}_p{p}.{suffix}" if dot else f"{output}_p{p}"
            configs.append(cls(
                dataset=DatasetRef(**dataset),
                detector=resolved,
                score=None if score is None else ScoreKind(score),
                seeds=list(payload.get("seeds", [0, 1, 2, 3, 4])),
                output=output,
                name=name,
            ))
        return configs
