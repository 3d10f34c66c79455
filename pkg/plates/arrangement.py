"""
Character arrangement: decides whether a plate is printed on one or two lines, splits the characters into lines and
reads them left to right.

All comparisons use the top-left corner of each character box in raw crop pixels, against the crop width::

    single line  iff  max(y) - min(y) < w * 0.3
    first line   iff  y < w * 0.3
"""
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple

from detection import CharDetection, ContractViolation

__all__ = ["LINE_RATIO", "ArrangementError", "LineCategory", "ArrangedPlate", "categorize", "split_lines", "arrange"]

LINE_RATIO = 0.3


class ArrangementError(Exception):
    pass


class LineCategory(Enum):
    """
    The printed layout of a plate. The value is the number of text lines.
    """
    SingleLineLP = 1
    DoubleLineLP = 2

    @property
    def label(self) -> str:
        return "single" if self is LineCategory.SingleLineLP else "double"

    @classmethod
    def from_label(cls, label: str) -> "LineCategory":
        for category in cls:
            if category.label == label:
                return category
        raise ValueError(f"Unknown line category {label!r}")


@dataclass(frozen=True)
class ArrangedPlate:
    """
    :param category: single or double line
    :param ordered_chars: (symbol, CharDetection) pairs in reading order
    :param raw_string: the symbols in reading order, before any correction
    :param line_break: index of the first second-line character (len(ordered_chars) for single-line plates)
    """
    category: LineCategory
    ordered_chars: Tuple[Tuple[str, CharDetection], ...]
    raw_string: str
    line_break: int

    @property
    def confidences(self) -> List[float]:
        return [char.confidence for _, char in self.ordered_chars]


def _check(chars: Sequence[CharDetection], crop_width: float) -> None:
    if len(chars) == 0:
        raise ArrangementError("Cannot arrange a plate with no characters")
    if not crop_width > 0:
        raise ContractViolation(f"Crop width must be positive, got {crop_width}")


def categorize(chars: Sequence[CharDetection], crop_width: float) -> LineCategory:
    _check(chars, crop_width)
    ys = [char.bbox.y1 for char in chars]
    if max(ys) - min(ys) < crop_width * LINE_RATIO:
        return LineCategory.SingleLineLP
    return LineCategory.DoubleLineLP


def split_lines(chars: Sequence[CharDetection],
                crop_width: float) -> Tuple[List[CharDetection], List[CharDetection]]:
    """
    Assigns every character to the first line iff its top edge is above crop_width * 0.3. Input order is kept within
    each line.
    """
    threshold = crop_width * LINE_RATIO
    first = [char for char in chars if char.bbox.y1 < threshold]
    second = [char for char in chars if not char.bbox.y1 < threshold]
    return first, second


def _reading_key(char: CharDetection):
    box = char.bbox
    return box.x1, box.y1, -box.score, box.class_id, box.x2, box.y2


def arrange(chars: Sequence[CharDetection], crop_width: float) -> ArrangedPlate:
    """
    Orders characters by ascending x, line by line. Equal x is broken by ascending y, then descending confidence, so the
    result does not depend on input order.

    :raises ArrangementError: if there are no characters
    """
    category = categorize(chars, crop_width)
    if category is LineCategory.SingleLineLP:
        lines = [sorted(chars, key=_reading_key)]
    else:
        lines = [sorted(line, key=_reading_key) for line in split_lines(chars, crop_width)]

    ordered = tuple((char.symbol, char) for line in lines for char in line)
    line_break = len(lines[0]) if category is LineCategory.DoubleLineLP else len(ordered)
    return ArrangedPlate(category, ordered, "".join(symbol for symbol, _ in ordered), line_break)
