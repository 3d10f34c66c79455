"""
Axis-aligned box arithmetic, IoU and greedy non-maximum suppression.

Boxes are (x1, y1, x2, y2) in real-valued pixels, left-top and right-bottom corners. Two suppression entry points are
provided: nms() for a single class in a single frame, and batched_nms(), which runs every (frame, class) group in one
pass and ignores overlaps between boxes of different groups.
"""
import math
from dataclasses import dataclass
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

__all__ = ["ContractViolation", "BBox", "iou", "pairwise_iou", "score_order", "nms", "nms_indices", "batched_nms",
           "batched_nms_indices"]


class ContractViolation(ValueError):
    pass


@dataclass(frozen=True)
class BBox:
    """
    A BBox is the detection currency shared by every stage: plate detections, character detections and ground truth.

    :param x1: left edge in pixels
    :param y1: top edge in pixels
    :param x2: right edge in pixels
    :param y2: bottom edge in pixels
    :param score: detection confidence on [0, 1]
    :param class_id: integer class label
    """
    x1: float
    y1: float
    x2: float
    y2: float
    score: float = 1.0
    class_id: int = 0

    def __post_init__(self):
        for name in ("x1", "y1", "x2", "y2", "score"):
            object.__setattr__(self, name, float(getattr(self, name)))
        coords = (self.x1, self.y1, self.x2, self.y2, self.score)
        if not all(math.isfinite(c) for c in coords):
            raise ContractViolation(f"BBox values must be finite, got {coords}")
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise ContractViolation(f"BBox must have positive area, got ({self.x1}, {self.y1}, {self.x2}, {self.y2})")
        if not 0 <= self.score <= 1:
            raise ContractViolation(f"BBox score must be on [0, 1], got {self.score}")

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return (self.x2 - self.x1) * (self.y2 - self.y1)

    @property
    def center(self) -> Tuple[float, float]:
        return (self.x1 + self.x2) / 2, (self.y1 + self.y2) / 2

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return self.x1, self.y1, self.x2, self.y2

    def translated(self, dx: float, dy: float) -> "BBox":
        return BBox(self.x1 + dx, self.y1 + dy, self.x2 + dx, self.y2 + dy, self.score, self.class_id)

    def scaled(self, sx: float, sy: float) -> "BBox":
        return BBox(self.x1 * sx, self.y1 * sy, self.x2 * sx, self.y2 * sy, self.score, self.class_id)

    def clamped(self, width: float, height: float) -> Optional["BBox"]:
        """
        Clamps this BBox on [0, width] x [0, height].

        :return: the clamped BBox, or None if nothing of it is left inside the region
        """
        x1 = min(max(self.x1, 0.0), width)
        y1 = min(max(self.y1, 0.0), height)
        x2 = min(max(self.x2, 0.0), width)
        y2 = min(max(self.y2, 0.0), height)
        if x1 >= x2 or y1 >= y2:
            return None
        return BBox(x1, y1, x2, y2, self.score, self.class_id)


def iou(a: BBox, b: BBox) -> float:
    """
    Intersection over union of two boxes. Touching edges do not overlap.
    """
    inter_w = max(0.0, min(a.x2, b.x2) - max(a.x1, b.x1))
    inter_h = max(0.0, min(a.y2, b.y2) - max(a.y1, b.y1))
    inter = inter_w * inter_h
    union = a.area + b.area - inter
    return inter / union


def _as_array(dets: Sequence[BBox]) -> np.ndarray:
    if len(dets) == 0:
        return np.zeros((0, 5), dtype=np.float64)
    return np.array([(d.x1, d.y1, d.x2, d.y2, d.score) for d in dets], dtype=np.float64)


def pairwise_iou(a: Sequence[BBox], b: Sequence[BBox]) -> np.ndarray:
    """
    :return: an (len(a), len(b)) matrix of IoU values
    """
    arr_a = _as_array(a)
    arr_b = _as_array(b)
    inter_w = np.maximum(0.0, np.minimum(arr_a[:, None, 2], arr_b[None, :, 2]) -
                         np.maximum(arr_a[:, None, 0], arr_b[None, :, 0]))
    inter_h = np.maximum(0.0, np.minimum(arr_a[:, None, 3], arr_b[None, :, 3]) -
                         np.maximum(arr_a[:, None, 1], arr_b[None, :, 1]))
    inter = inter_w * inter_h
    area_a = (arr_a[:, 2] - arr_a[:, 0]) * (arr_a[:, 3] - arr_a[:, 1])
    area_b = (arr_b[:, 2] - arr_b[:, 0]) * (arr_b[:, 3] - arr_b[:, 1])
    return inter / (area_a[:, None] + area_b[None, :] - inter)


def _order(arr: np.ndarray) -> np.ndarray:
    # score descending, then lower x1, lower y1, insertion order
    index = np.arange(arr.shape[0])
    return np.lexsort((index, arr[:, 1], arr[:, 0], -arr[:, 4]))


def score_order(dets: Sequence[BBox]) -> List[int]:
    """
    Deterministic processing order used by suppression and matching: descending score, ties broken by lower x1, then
    lower y1, then insertion order.
    """
    return _order(_as_array(dets)).tolist()


def _greedy(coords: np.ndarray, order: np.ndarray, iou_threshold: float,
            groups: Optional[np.ndarray] = None) -> List[int]:
    x1, y1, x2, y2 = coords[:, 0], coords[:, 1], coords[:, 2], coords[:, 3]
    areas = (x2 - x1) * (y2 - y1)

    keep = []
    while order.size > 0:
        i = order[0]
        keep.append(int(i))
        rest = order[1:]
        inter_w = np.maximum(0.0, np.minimum(x2[i], x2[rest]) - np.maximum(x1[i], x1[rest]))
        inter_h = np.maximum(0.0, np.minimum(y2[i], y2[rest]) - np.maximum(y1[i], y1[rest]))
        inter = inter_w * inter_h
        overlap = inter / (areas[i] + areas[rest] - inter)
        if groups is not None:
            overlap[groups[rest] != groups[i]] = 0.0
        order = rest[overlap < iou_threshold]

    return keep


def _check_threshold(iou_threshold: float) -> None:
    if not 0 < iou_threshold <= 1:
        raise ContractViolation(f"IoU threshold must be on (0, 1], got {iou_threshold}")


def nms_indices(dets: Sequence[BBox], iou_threshold: float = 0.5) -> List[int]:
    """
    Greedy suppression over boxes of a single class.

    :return: the indices of the kept boxes, in processing order (descending score)
    :raises ContractViolation: if the boxes carry more than one class_id or the threshold is off (0, 1]
    """
    _check_threshold(iou_threshold)
    classes = {d.class_id for d in dets}
    if len(classes) > 1:
        raise ContractViolation(f"nms() expects a single class_id, got {sorted(classes)}")

    arr = _as_array(dets)
    return _greedy(arr[:, :4], _order(arr), iou_threshold)


def nms(dets: Sequence[BBox], iou_threshold: float = 0.5) -> List[BBox]:
    """
    Sorts by score and keeps a box iff its IoU with every already-kept box is below iou_threshold.
    """
    return [dets[i] for i in nms_indices(dets, iou_threshold)]


def batched_nms_indices(dets: Sequence[BBox], iou_threshold: float = 0.5,
                        frame_ids: Optional[Sequence[Hashable]] = None) -> List[int]:
    """
    Suppression over every (frame_id, class_id) group in a single pass. Every box carries its group index and overlaps
    between boxes of different groups count as zero. Overlaps are computed on the original coordinates, so every IoU,
    and with it every keep decision, is bit-identical to running nms() on each group.

    :param dets: boxes of any mix of classes and frames
    :param iou_threshold: suppression threshold on (0, 1]
    :param frame_ids: a frame id per box; None means all boxes come from one frame
    :return: the indices of the kept boxes, in processing order
    """
    _check_threshold(iou_threshold)
    if frame_ids is None:
        frame_ids = [None] * len(dets)
    if len(frame_ids) != len(dets):
        raise ContractViolation(f"Got {len(frame_ids)} frame ids for {len(dets)} boxes")
    if len(dets) == 0:
        return []

    arr = _as_array(dets)
    groups: Dict[Tuple[Hashable, int], int] = {}
    group_index = np.array([groups.setdefault((frame_id, d.class_id), len(groups))
                            for frame_id, d in zip(frame_ids, dets)], dtype=np.int64)

    return _greedy(arr[:, :4], _order(arr), iou_threshold, group_index)


def batched_nms(dets: Sequence[BBox], iou_threshold: float = 0.5,
                frame_ids: Optional[Sequence[Hashable]] = None) -> List[BBox]:
    """
    Same result, as a set, as running nms() on every (frame_id, class_id) group separately.
    """
    return [dets[i] for i in batched_nms_indices(dets, iou_threshold, frame_ids)]
