"""
Dataset statistics over an annotation document: frames per split, and plates by line count and recognizability.
"""
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Tuple

from dataio.documents import AnnotationDoc

__all__ = ["DatasetSummary", "summarize", "format_summary"]

UNSPLIT = "unsplit"


@dataclass
class DatasetSummary:
    frames: int = 0
    frames_by_split: Dict[str, int] = field(default_factory=dict)
    plates: Dict[Tuple[int, bool], int] = field(default_factory=dict)  # (lines, recognizable) -> count

    def count(self, lines: int = None, recognizable: bool = None) -> int:
        return sum(n for (l, r), n in self.plates.items()
                   if (lines is None or l == lines) and (recognizable is None or r == recognizable))

    def to_dict(self) -> Dict[str, object]:
        return {"frames": self.frames,
                "frames_by_split": dict(sorted(self.frames_by_split.items())),
                "plates": {f"{'single' if lines == 1 else 'double'}_"
                           f"{'recognizable' if recognizable else 'unrecognizable'}": n
                           for (lines, recognizable), n in sorted(self.plates.items())},
                "total_plates": self.count()}


def summarize(doc: AnnotationDoc) -> DatasetSummary:
    splits = Counter(frame.split or UNSPLIT for frame in doc.frames)
    plates = Counter((plate.lines, plate.recognizable) for frame in doc.frames for plate in frame.plates)
    cells = {(lines, recognizable): plates.get((lines, recognizable), 0) for lines in (1, 2) for recognizable in
             (True, False)}
    return DatasetSummary(len(doc.frames), dict(splits), cells)


def format_summary(summary: DatasetSummary) -> str:
    rows = [f"{'Split':<12}{'Frames':>8}"]
    for split, n in sorted(summary.frames_by_split.items()):
        rows.append(f"{split:<12}{n:>8}")
    rows.append(f"{'total':<12}{summary.frames:>8}")
    rows.append("")

    rows.append(f"{'Plates':<16}{'Recognizable':>14}{'Unrecognizable':>16}{'Total':>8}")
    for lines, label in ((1, "single line"), (2, "double line")):
        rows.append(f"{label:<16}{summary.count(lines, True):>14}{summary.count(lines, False):>16}"
                    f"{summary.count(lines):>8}")
    rows.append(f"{'total':<16}{summary.count(recognizable=True):>14}{summary.count(recognizable=False):>16}"
                f"{summary.count():>8}")
    return "\n".join(rows)
