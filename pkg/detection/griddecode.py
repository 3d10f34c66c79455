"""
Decoding of the character recognizer's grid output.

The recognizer takes a plate crop resized to 288x200 and predicts on a 36x25 grid (stride 8, one predictor per cell, no
anchors). Every cell carries 40 channels::

    [objectness, tx, ty, tw, th, 35 class logits]

Cells are stored row-major, channels contiguous per cell, so a flat payload reshapes to (rows, cols, channels).
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from detection.boxes import BBox, ContractViolation, batched_nms_indices

__all__ = ["SYMBOLS", "NUM_CLASSES", "BOX_CHANNELS", "CHAR_INPUT_WIDTH", "CHAR_INPUT_HEIGHT", "GRID_STRIDE",
           "DecodeError", "GridLayout", "DEFAULT_LAYOUT", "GridTensor", "CharDetection", "class_to_symbol",
           "symbol_to_class", "decode_grid", "render_grid"]

# 0-9 then A-Z without O; the digit 0 and the letter O share class 0
SYMBOLS = "0123456789ABCDEFGHIJKLMNPQRSTUVWXYZ"
NUM_CLASSES = len(SYMBOLS)
BOX_CHANNELS = 5
CHAR_INPUT_WIDTH = 288
CHAR_INPUT_HEIGHT = 200
GRID_STRIDE = 8

HOT_LOGIT = 10.0
COLD_LOGIT = -10.0

_SYMBOL_TO_CLASS = {symbol: i for i, symbol in enumerate(SYMBOLS)}
_SYMBOL_TO_CLASS["O"] = 0


class DecodeError(Exception):
    pass


@dataclass(frozen=True)
class GridLayout:
    """
    Input size and stride of the recognizer network. The grid size follows from them.
    """
    input_width: int = CHAR_INPUT_WIDTH
    input_height: int = CHAR_INPUT_HEIGHT
    stride: int = GRID_STRIDE

    def __post_init__(self):
        if self.stride <= 0 or self.input_width % self.stride != 0 or self.input_height % self.stride != 0:
            raise ContractViolation(f"Input {self.input_width}x{self.input_height} is not divisible by stride "
                                    f"{self.stride}")

    @property
    def width_cells(self) -> int:
        return self.input_width // self.stride

    @property
    def height_cells(self) -> int:
        return self.input_height // self.stride

    @property
    def channels(self) -> int:
        return BOX_CHANNELS + NUM_CLASSES

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.height_cells, self.width_cells, self.channels


DEFAULT_LAYOUT = GridLayout()


@dataclass(frozen=True, eq=False)
class GridTensor:
    """
    Raw logits of one recognizer output, shaped (height_cells, width_cells, channels). Dimensions are checked here;
    finiteness is checked by decode_grid().

    :param extras: fields of the stored tensor this library does not read, kept so they can be written back
    :param layout_extras: the same, for the stored layout
    """
    values: np.ndarray
    layout: GridLayout = DEFAULT_LAYOUT
    extras: Dict[str, Any] = field(default_factory=dict)
    layout_extras: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.shape != self.layout.shape:
            raise ContractViolation(f"Grid tensor must be {self.layout.shape}, got {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_flat(cls, flat: Sequence[float], layout: GridLayout = DEFAULT_LAYOUT) -> "GridTensor":
        flat = np.asarray(flat, dtype=np.float64)
        expected = int(np.prod(layout.shape))
        if flat.ndim != 1 or flat.size != expected:
            raise ContractViolation(f"Flat grid payload must hold {expected} values, got {flat.size}")
        return cls(flat.reshape(layout.shape), layout)

    def flat(self) -> List[float]:
        return self.values.reshape(-1).tolist()


@dataclass(frozen=True)
class CharDetection:
    """
    A recognized character.

    :param bbox: the character box; its score is the confidence and its class_id the character class
    :param center: the decoded center before clamping, if this came from a grid
    :param cell: the (row, col) grid cell this came from, if any
    """
    bbox: BBox
    center: Optional[Tuple[float, float]] = field(default=None, compare=False)
    cell: Optional[Tuple[int, int]] = field(default=None, compare=False)

    def __post_init__(self):
        if not 0 <= self.bbox.class_id < NUM_CLASSES:
            raise ContractViolation(f"Character class must be on [0, {NUM_CLASSES - 1}], got {self.bbox.class_id}")

    @classmethod
    def of(cls, symbol: str, x1: float, y1: float, x2: float, y2: float, confidence: float = 1.0) -> "CharDetection":
        return cls(BBox(x1, y1, x2, y2, confidence, symbol_to_class(symbol)))

    @property
    def class_id(self) -> int:
        return self.bbox.class_id

    @property
    def confidence(self) -> float:
        return self.bbox.score

    @property
    def symbol(self) -> str:
        return SYMBOLS[self.bbox.class_id]

    def with_bbox(self, bbox: BBox) -> "CharDetection":
        return CharDetection(bbox, self.center, self.cell)


def class_to_symbol(class_id: int) -> str:
    if not 0 <= class_id < NUM_CLASSES:
        raise ContractViolation(f"Character class must be on [0, {NUM_CLASSES - 1}], got {class_id}")
    return SYMBOLS[class_id]


def symbol_to_class(symbol: str) -> int:
    """
    Maps a plate symbol to its class. "O" maps onto the shared 0/O class.
    """
    try:
        return _SYMBOL_TO_CLASS[symbol]
    except KeyError:
        raise ContractViolation(f"{symbol!r} is not a plate symbol") from None


def _sigmoid(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-x))


def decode_grid(t: GridTensor, conf_threshold: float = 0.25, iou_threshold: float = 0.5) -> List[CharDetection]:
    """
    Decodes every cell, keeps those whose objectness times class probability reaches conf_threshold, then suppresses
    duplicates per class.

    :return: CharDetections in network input coordinates, by descending confidence
    :raises DecodeError: if the tensor holds non-finite values
    """
    if not (0 < conf_threshold <= 1 and 0 < iou_threshold <= 1):
        raise ContractViolation(f"Thresholds must be on (0, 1], got {conf_threshold} and {iou_threshold}")
    values = t.values
    if not np.all(np.isfinite(values)):
        bad = np.argwhere(~np.isfinite(values))[0]
        raise DecodeError(f"Grid tensor holds a non-finite value at (row, col, channel) = {tuple(bad.tolist())}")

    layout = t.layout
    stride = layout.stride
    rows = np.arange(layout.height_cells, dtype=np.float64)[:, None]
    cols = np.arange(layout.width_cells, dtype=np.float64)[None, :]

    objectness = _sigmoid(values[..., 0])
    center_x = (cols + _sigmoid(values[..., 1])) * stride
    center_y = (rows + _sigmoid(values[..., 2])) * stride
    with np.errstate(over="ignore"):
        box_w = np.exp(values[..., 3]) * stride
        box_h = np.exp(values[..., 4]) * stride

    logits = values[..., BOX_CHANNELS:]
    logits = logits - logits.max(axis=-1, keepdims=True)
    probabilities = np.exp(logits)
    probabilities /= probabilities.sum(axis=-1, keepdims=True)
    classes = probabilities.argmax(axis=-1)
    confidence = objectness * probabilities.max(axis=-1)

    candidates: List[CharDetection] = []
    for row, col in np.argwhere(confidence >= conf_threshold):
        cx, cy = float(center_x[row, col]), float(center_y[row, col])
        w, h = float(box_w[row, col]), float(box_h[row, col])
        score = min(max(float(confidence[row, col]), 0.0), 1.0)
        x1, y1, x2, y2 = cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2
        if not all(math.isfinite(v) for v in (x1, y1, x2, y2)) or x1 >= x2 or y1 >= y2:
            logging.debug(f"Dropping degenerate cell ({row}, {col}) of size {w}x{h}")
            continue
        box = BBox(x1, y1, x2, y2, score, int(classes[row, col])).clamped(layout.input_width, layout.input_height)
        if box is None:
            continue
        candidates.append(CharDetection(box, (cx, cy), (int(row), int(col))))

    keep = batched_nms_indices([c.bbox for c in candidates], iou_threshold)
    return [candidates[i] for i in keep]


def render_grid(chars: Iterable[Tuple[int, float, float, float, float]],
                layout: GridLayout = DEFAULT_LAYOUT) -> GridTensor:
    """
    Builds the tensor that decodes back into the given characters. Used for fixtures and synthetic corpora.

    :param chars: (class_id, center_x, center_y, width, height) in network input coordinates
    :raises ContractViolation: if two characters fall into the same cell
    """
    values = np.zeros(layout.shape, dtype=np.float64)
    values[..., 0] = COLD_LOGIT
    stride = layout.stride
    taken = set()

    for class_id, cx, cy, w, h in chars:
        class_to_symbol(class_id)
        col = min(max(int(cx // stride), 0), layout.width_cells - 1)
        row = min(max(int(cy // stride), 0), layout.height_cells - 1)
        if (row, col) in taken:
            raise ContractViolation(f"Two characters fall into grid cell ({row}, {col})")
        taken.add((row, col))

        frac_x = min(max(cx / stride - col, 1e-6), 1 - 1e-6)
        frac_y = min(max(cy / stride - row, 1e-6), 1 - 1e-6)
        values[row, col, 0] = HOT_LOGIT
        values[row, col, 1] = math.log(frac_x / (1 - frac_x))
        values[row, col, 2] = math.log(frac_y / (1 - frac_y))
        values[row, col, 3] = math.log(w / stride)
        values[row, col, 4] = math.log(h / stride)
        values[row, col, BOX_CHANNELS:] = COLD_LOGIT
        values[row, col, BOX_CHANNELS + class_id] = HOT_LOGIT

    return GridTensor(values, layout)
