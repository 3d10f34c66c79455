"""
Scoring pipeline output against ground truth.

Detection is scored by greedy one-to-one matching at an IoU threshold; recognition by the edit distance between the
final string and the annotated plate string, bucketed as exact, within 1 character and within 2 characters.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from dataio.documents import AnnotationDoc, ResultsDoc
from detection import BBox, ContractViolation, pairwise_iou, score_order

__all__ = ["EvaluationError", "DetectionMatching", "match_detections", "char_errors", "RecognitionStats",
           "DetectionStats", "EvalReport", "evaluate", "format_report"]


class EvaluationError(Exception):
    pass


@dataclass(frozen=True)
class DetectionMatching:
    true_positives: int
    false_positives: int
    false_negatives: int
    pairs: Tuple[Tuple[int, int], ...] = ()  # (prediction index, ground truth index)

    @property
    def precision(self) -> float:
        found = self.true_positives + self.false_positives
        return self.true_positives / found if found else 0.0

    @property
    def recall(self) -> float:
        expected = self.true_positives + self.false_negatives
        return self.true_positives / expected if expected else 0.0


def match_detections(preds: Sequence[BBox], gts: Sequence[BBox], iou_threshold: float = 0.5) -> DetectionMatching:
    """
    Walks predictions by descending score and pairs each with the unmatched ground truth box it overlaps most. A pair
    is a true positive when that overlap reaches iou_threshold; every other prediction is a false positive.
    """
    if not 0 < iou_threshold <= 1:
        raise ContractViolation(f"IoU threshold must be on (0, 1], got {iou_threshold}")
    if not gts:
        return DetectionMatching(0, len(preds), 0)
    if not preds:
        return DetectionMatching(0, 0, len(gts))

    overlaps = pairwise_iou(preds, gts)
    free = np.ones(len(gts), dtype=bool)
    pairs = []
    for i in score_order(preds):
        candidates = np.where(free, overlaps[i], -1.0)
        best = int(np.argmax(candidates))
        if free[best] and candidates[best] >= iou_threshold:
            free[best] = False
            pairs.append((i, best))

    tp = len(pairs)
    return DetectionMatching(tp, len(preds) - tp, len(gts) - tp, tuple(pairs))


def char_errors(predicted: str, truth: str) -> int:
    """
    Levenshtein distance with unit cost insertions, deletions and substitutions.
    """
    if len(predicted) < len(truth):
        predicted, truth = truth, predicted
    previous = list(range(len(truth) + 1))
    for i, p in enumerate(predicted, 1):
        current = [i]
        for j, t in enumerate(truth, 1):
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (p != t)))
        previous = current
    return previous[-1]


@dataclass
class RecognitionStats:
    total: int = 0
    exact_correct: int = 0
    within_1: int = 0
    within_2: int = 0

    def add(self, predicted: str, truth: str) -> None:
        errors = char_errors(predicted, truth)
        self.total += 1
        self.exact_correct += errors == 0
        self.within_1 += errors <= 1
        self.within_2 += errors <= 2

    def _ratio(self, count: int) -> float:
        return count / self.total if self.total else 0.0

    @property
    def accuracy(self) -> float:
        return self._ratio(self.exact_correct)

    @property
    def accuracy_1(self) -> float:
        return self._ratio(self.within_1)

    @property
    def accuracy_2(self) -> float:
        return self._ratio(self.within_2)

    def to_dict(self) -> Dict[str, float]:
        return {"total": self.total, "exact_correct": self.exact_correct, "within_1": self.within_1,
                "within_2": self.within_2, "accuracy": self.accuracy, "accuracy_1": self.accuracy_1,
                "accuracy_2": self.accuracy_2}


@dataclass
class DetectionStats:
    true_positives: int = 0
    false_positives: int = 0
    false_negatives: int = 0

    def add(self, matching: DetectionMatching) -> None:
        self.true_positives += matching.true_positives
        self.false_positives += matching.false_positives
        self.false_negatives += matching.false_negatives

    @property
    def precision(self) -> float:
        return DetectionMatching(self.true_positives, self.false_positives, self.false_negatives).precision

    @property
    def recall(self) -> float:
        return DetectionMatching(self.true_positives, self.false_positives, self.false_negatives).recall

    def to_dict(self) -> Dict[str, float]:
        return {"true_positives": self.true_positives, "false_positives": self.false_positives,
                "false_negatives": self.false_negatives, "precision": self.precision, "recall": self.recall}


@dataclass
class EvalReport:
    detection: DetectionStats
    recognition: RecognitionStats
    by_lines: Dict[str, RecognitionStats]
    iou_threshold: float = 0.5

    def to_dict(self) -> Dict[str, object]:
        return {"iou_threshold": self.iou_threshold,
                "detection": self.detection.to_dict(),
                "recognition": self.recognition.to_dict(),
                "by_lines": {label: stats.to_dict() for label, stats in sorted(self.by_lines.items())}}


_LINE_LABELS = {1: "single", 2: "double"}


def evaluate(results: ResultsDoc, annotations: AnnotationDoc, iou_threshold: float = 0.5) -> EvalReport:
    """
    Scores every result frame against the annotation frame with the same id.

    Every crop the pipeline produced (read, rejected or failed) counts as a detection. Recognition is scored over
    recognizable ground truth plates only: a matched plate contributes the final string of its reading ("" if the crop
    was rejected or failed), an unmatched one contributes "".

    :raises EvaluationError: if a result frame has no annotation
    """
    detection = DetectionStats()
    recognition = RecognitionStats()
    by_lines = {label: RecognitionStats() for label in _LINE_LABELS.values()}

    for frame in results.frames:
        truth = annotations.frame(frame.frame_id)
        if truth is None:
            raise EvaluationError(f"Frame {frame.frame_id!r} has results but no annotations")

        preds: List[BBox] = []
        strings: List[Optional[str]] = []
        for reading in frame.readings:
            preds.append(reading.bbox)
            strings.append(reading.final_string)
        for crop in list(frame.rejected) + list(frame.errors):
            preds.append(crop.bbox)
            strings.append(None)

        matching = match_detections(preds, [plate.bbox for plate in truth.plates], iou_threshold)
        detection.add(matching)

        read_as = {gt: strings[pred] for pred, gt in matching.pairs}
        for gt, plate in enumerate(truth.plates):
            if not plate.recognizable:
                continue
            predicted = read_as.get(gt) or ""
            recognition.add(predicted, plate.plate_string)
            by_lines[_LINE_LABELS[plate.lines]].add(predicted, plate.plate_string)

    scored = {frame.frame_id for frame in results.frames}
    skipped = [frame for frame in annotations.frames if frame.frame_id not in scored]
    if skipped:
        logging.info(f"Skipped {len(skipped)} annotated frames with no results "
                     f"({sum(p.recognizable for frame in skipped for p in frame.plates)} recognizable plates)")

    return EvalReport(detection, recognition, by_lines, iou_threshold)


def format_report(report: EvalReport) -> str:
    """
    Renders a report as a text table: detection counts and precision, then one row each for single line, double line
    and all plates with exact, within 1 and within 2 character accuracy.
    """
    det = report.detection
    rows = [f"Detection @ IoU {report.iou_threshold:g}: precision {det.precision:.2%} "
            f"({det.true_positives} TP, {det.false_positives} FP, {det.false_negatives} FN)",
            "",
            f"{'Plates':<8}{'Total':>7}{'Exact':>9}{'<=1 err':>9}{'<=2 err':>9}{'Correct':>9}{'Incorrect':>11}"]
    for label, stats in (("Single", report.by_lines["single"]), ("Double", report.by_lines["double"]),
                         ("Total", report.recognition)):
        rows.append(f"{label:<8}{stats.total:>7}{stats.accuracy:>9.2%}{stats.accuracy_1:>9.2%}"
                    f"{stats.accuracy_2:>9.2%}{stats.exact_correct:>9}{stats.total - stats.exact_correct:>11}")
    return "\n".join(rows)
