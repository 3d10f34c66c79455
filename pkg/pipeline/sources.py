"""
Where the pipeline gets its model outputs from. The plate detector and the character recognizer are outside this
project; a DetectionSource stands in for either one, keyed by frame id (plates) or crop id (characters).
"""
from abc import ABC, abstractmethod
from enum import Enum
from pathlib import Path
from typing import Sequence, Union

from dataio.documents import CharFixture, FixtureDoc, load_fixture
from detection import BBox

__all__ = ["SourceRole", "MissingFixtureError", "DetectionSource", "PlateSource", "CharSource", "FixtureSource"]


class SourceRole(Enum):
    PlateDetector = "plate_detector"
    CharRecognizer = "char_recognizer"


class MissingFixtureError(KeyError):
    def __init__(self, role: SourceRole, key: str):
        self.role = role
        self.key = key
        super().__init__(key)

    def __str__(self):
        return f"no {self.role.value} fixture for {self.key!r}"


class DetectionSource(ABC):
    role: SourceRole

    @abstractmethod
    def detections(self, key: str):
        """
        :raises MissingFixtureError: if nothing is recorded under key
        """
        pass


class PlateSource(DetectionSource, ABC):
    role = SourceRole.PlateDetector

    @abstractmethod
    def detections(self, key: str) -> Sequence[BBox]:
        pass


class CharSource(DetectionSource, ABC):
    role = SourceRole.CharRecognizer

    @abstractmethod
    def detections(self, key: str) -> CharFixture:
        pass


class FixtureSource(PlateSource, CharSource):
    def __init__(self, doc: FixtureDoc, role: SourceRole):
        """
        Replays a fixture document as either detector.
        """
        self.doc = doc
        self.role = role
        self._frames = {frame.frame_id: frame for frame in doc.frames}

    @classmethod
    def from_file(cls, path: Union[str, Path], role: SourceRole) -> "FixtureSource":
        return cls(load_fixture(path), role)

    def detections(self, key: str):
        if self.role is SourceRole.PlateDetector:
            if key not in self._frames:
                raise MissingFixtureError(self.role, key)
            return self._frames[key].detections

        if key not in self.doc.crops:
            raise MissingFixtureError(self.role, key)
        return self.doc.crops[key]
