"""
Plate format rules: locating the parts of a recognized string, fixing digit/letter confusions and validating the result.

Post-processing is region specific, so every region is a PlateFormat. SingaporeFormat implements the four-part layout::

    vehicle class (1 letter) | alphabetical series (0-2 letters) | numerical series (1-4 digits) | checksum (1 letter)

The series never uses "I" or "O", and the checksum letter is never one of F, I, N, O, Q, V, W.
"""
import random
import string
from abc import ABC, abstractmethod
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, List, Mapping, NamedTuple, Optional, Tuple, Type

from detection import SYMBOLS

__all__ = ["LETTER", "DIGIT", "DIGIT_TO_LETTER", "LETTER_TO_DIGIT", "CORRECTION_TABLES", "SERIES_EXCLUDED",
           "CHECKSUM_EXCLUDED", "Change", "Partition", "PlateLayout", "Validation", "CorrectionResult", "PlateFormat",
           "SingaporeFormat", "PLATE_FORMATS", "get_plate_format", "DEFAULT_FORMAT", "partition", "correct",
           "validate", "check"]

LETTER = "L"
DIGIT = "D"

# Shapes that get confused, as listed for Singapore plates, plus 0/O and 6/G
DIGIT_TO_LETTER: Mapping[str, str] = MappingProxyType({
    "5": "S", "3": "S", "8": "B", "7": "Z", "2": "Z", "4": "A", "1": "T", "0": "O", "6": "G",
})
LETTER_TO_DIGIT: Mapping[str, str] = MappingProxyType({
    "S": "5", "B": "8", "Z": "7", "A": "4", "I": "1", "T": "1", "L": "1", "D": "0", "O": "0", "Q": "0", "G": "6",
})
CORRECTION_TABLES: Mapping[str, Mapping[str, str]] = MappingProxyType({
    "digit_to_letter": DIGIT_TO_LETTER,
    "letter_to_digit": LETTER_TO_DIGIT,
})

SERIES_EXCLUDED = frozenset("IO")
CHECKSUM_EXCLUDED = frozenset("FINOQVW")

MIN_LENGTH = 3
MAX_LENGTH = 8


def _is_letter(ch: str) -> bool:
    return ch in string.ascii_uppercase


def _is_digit(ch: str) -> bool:
    return ch in string.digits


class Change(NamedTuple):
    position: int
    source: str
    target: str


class Partition(NamedTuple):
    """
    A split of a string into prefix letters (vehicle class + series), digits and one checksum letter.
    """
    prefix: int
    digits: int
    score: int

    def classes(self) -> str:
        return LETTER * self.prefix + DIGIT * self.digits + LETTER


@dataclass(frozen=True)
class PlateLayout:
    vehicle_class: str
    alpha_series: str
    numeric_series: str
    checksum_letter: str

    def __post_init__(self):
        if len(self.vehicle_class) != 1 or len(self.checksum_letter) != 1:
            raise ValueError("Vehicle class and checksum letter are one character each")
        if len(self.alpha_series) > 2 or not 1 <= len(self.numeric_series) <= 4:
            raise ValueError(f"Series lengths out of range: {self.alpha_series!r}, {self.numeric_series!r}")

    @classmethod
    def from_partition(cls, s: str, part: Partition) -> "PlateLayout":
        return cls(s[0], s[1:part.prefix], s[part.prefix:part.prefix + part.digits], s[-1])

    @property
    def text(self) -> str:
        return self.vehicle_class + self.alpha_series + self.numeric_series + self.checksum_letter


@dataclass(frozen=True)
class Validation:
    valid: bool
    violations: Tuple[str, ...] = ()

    def __bool__(self):
        return self.valid


@dataclass(frozen=True)
class CorrectionResult:
    """
    :param corrected: the string after rewriting, same length as the input
    :param layout: the layout of the chosen partition, absent if none exists
    :param valid: whether corrected passes every layout rule
    :param changes: every rewrite, as (position, from, to)
    :param violations: the rules corrected still breaks
    """
    corrected: str
    layout: Optional[PlateLayout]
    valid: bool
    changes: Tuple[Change, ...] = ()
    violations: Tuple[str, ...] = ()


class PlateFormat(ABC):
    """
    A PlateFormat encodes one region's plate grammar. Subclasses define how a string is split into parts, which
    rewrites apply inside each part, and which finished layouts are legal.

    Two methods are built from those:
    ::
        correct() : rewrite confusions in the best partition, then validate
        check()   : validate without rewriting
    """
    name = ""

    @abstractmethod
    def partition(self, s: str) -> List[Partition]:
        """
        Candidate partitions of s, best first. Empty if s cannot be a plate of this format.
        """
        raise NotImplementedError

    @abstractmethod
    def validate(self, layout: PlateLayout) -> Validation:
        raise NotImplementedError

    @abstractmethod
    def rewrite_table(self, required_class: str) -> Mapping[str, str]:
        """
        The rewrites applied to characters sitting in a part of required_class (LETTER or DIGIT).
        """
        raise NotImplementedError

    @abstractmethod
    def random_layout(self, rng: random.Random) -> Tuple[PlateLayout, Partition]:
        """
        A random legal plate, used to generate synthetic corpora.
        """
        raise NotImplementedError

    def correct(self, s: str) -> CorrectionResult:
        candidates = self.partition(s)
        if not candidates:
            return CorrectionResult(s, None, False, (), (f"{s!r} fits no {self.name} partition",))

        best = candidates[0]
        chars = list(s)
        changes = []
        for position, required_class in enumerate(best.classes()):
            source = chars[position]
            target = self.rewrite_table(required_class).get(source)
            if target is not None:
                chars[position] = target
                changes.append(Change(position, source, target))

        corrected = "".join(chars)
        layout = PlateLayout.from_partition(corrected, best)
        validation = self.validate(layout)
        return CorrectionResult(corrected, layout, validation.valid, tuple(changes), validation.violations)

    def check(self, s: str) -> CorrectionResult:
        candidates = self.partition(s)
        if not candidates:
            return CorrectionResult(s, None, False, (), (f"{s!r} fits no {self.name} partition",))

        best = candidates[0]
        layout = PlateLayout.from_partition(s, best)
        validation = self.validate(layout)
        return CorrectionResult(s, layout, validation.valid, (), validation.violations)


class SingaporeFormat(PlateFormat):
    name = "sg"

    def partition(self, s: str) -> List[Partition]:
        if not MIN_LENGTH <= len(s) <= MAX_LENGTH:
            return []

        candidates = []
        for prefix in (1, 2, 3):
            digits = len(s) - prefix - 1
            if not 1 <= digits <= 4:
                continue
            classes = LETTER * prefix + DIGIT * digits + LETTER
            score = sum(1 for ch, cls in zip(s, classes) if (_is_letter(ch) if cls == LETTER else _is_digit(ch)))
            candidates.append(Partition(prefix, digits, score))

        return sorted(candidates, key=lambda part: (-part.score, -part.digits))

    def rewrite_table(self, required_class: str) -> Mapping[str, str]:
        return DIGIT_TO_LETTER if required_class == LETTER else LETTER_TO_DIGIT

    def validate(self, layout: PlateLayout) -> Validation:
        violations = []
        if not MIN_LENGTH <= len(layout.text) <= MAX_LENGTH:
            violations.append(f"length {len(layout.text)} is outside [{MIN_LENGTH}, {MAX_LENGTH}]")
        if not _is_letter(layout.vehicle_class):
            violations.append(f"vehicle_class {layout.vehicle_class!r} is not a letter")
        for ch in layout.alpha_series:
            if not _is_letter(ch):
                violations.append(f"alpha_series character {ch!r} is not a letter")
            elif ch in SERIES_EXCLUDED:
                violations.append(f"alpha_series letter {ch!r} is not used (excluded: I, O)")
        for ch in layout.numeric_series:
            if not _is_digit(ch):
                violations.append(f"numeric_series character {ch!r} is not a digit")
        if not _is_letter(layout.checksum_letter):
            violations.append(f"checksum_letter {layout.checksum_letter!r} is not a letter")
        elif layout.checksum_letter in CHECKSUM_EXCLUDED:
            violations.append(f"checksum_letter {layout.checksum_letter!r} is in the excluded set "
                              f"{', '.join(sorted(CHECKSUM_EXCLUDED))}")

        return Validation(not violations, tuple(violations))

    def random_layout(self, rng: random.Random) -> Tuple[PlateLayout, Partition]:
        # letters the recognizer can emit; "O" only ever comes out as "0"
        letters = [ch for ch in SYMBOLS if _is_letter(ch)]
        series_letters = [ch for ch in letters if ch not in SERIES_EXCLUDED]
        checksum_letters = [ch for ch in letters if ch not in CHECKSUM_EXCLUDED]

        series = "".join(rng.choice(series_letters) for _ in range(rng.randint(0, 2)))
        digits = "".join(rng.choice(string.digits) for _ in range(rng.randint(1, 4)))
        layout = PlateLayout(rng.choice(letters), series, digits, rng.choice(checksum_letters))
        return layout, Partition(1 + len(series), len(digits), len(layout.text))


PLATE_FORMATS: Dict[str, Type[PlateFormat]] = {
    SingaporeFormat.name: SingaporeFormat,
}


def get_plate_format(name: str) -> PlateFormat:
    try:
        return PLATE_FORMATS[name]()
    except KeyError:
        raise ValueError(f"Unknown plate format {name!r}, expected one of {sorted(PLATE_FORMATS)}") from None


DEFAULT_FORMAT = SingaporeFormat()


def partition(s: str) -> List[Partition]:
    return DEFAULT_FORMAT.partition(s)


def correct(s: str) -> CorrectionResult:
    return DEFAULT_FORMAT.correct(s)


def validate(layout: PlateLayout) -> Validation:
    return DEFAULT_FORMAT.validate(layout)


def check(s: str) -> CorrectionResult:
    return DEFAULT_FORMAT.check(s)
