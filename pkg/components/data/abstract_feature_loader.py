from abc import ABC, abstractmethod

from entities.entity_features import FeatureMatrix


class AbstractFeatureLoader(ABC):
    suffixes: tuple = ()

    @abstractmethod
    def load(self, path: str, has_labels: bool = False) -> FeatureMatrix:
        """Read a feature matrix (and the label column if declared)."""
        pass

    @abstractmethod
    def save(self, matrix: FeatureMatrix, path: str) -> str:
        """Write a feature matrix; returns the written path."""
        pass
