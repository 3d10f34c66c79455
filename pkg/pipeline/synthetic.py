"""
Synthetic corpora: random legal plates laid out in frames and rendered as detector fixtures, with the matching ground
truth. Character fixtures can carry digit/letter confusions from the correction tables, so a corpus doubles as an
end-to-end check that correction recovers every plate.
"""
import random
from dataclasses import dataclass
from typing import Dict, List, Tuple

from dataio.documents import AnnotatedFrame, AnnotationDoc, CharFixture, CharList, FixtureDoc, FixtureFrame, \
    PlateAnnotation
from detection import BBox, CharDetection, DEFAULT_LAYOUT, GridLayout, render_grid
from pipeline.pipeline import Frame
from plates import DIGIT_TO_LETTER, LETTER, LETTER_TO_DIGIT, PlateFormat, get_plate_format

__all__ = ["SyntheticCorpus", "generate_corpus", "inject_confusions", "FRAME_WIDTH", "FRAME_HEIGHT"]

FRAME_WIDTH = 1920
FRAME_HEIGHT = 1080

# plates are placed one per slot so they never overlap
SLOT_WIDTH = 240
SLOT_HEIGHT = 180
SLOT_COLUMNS = FRAME_WIDTH // SLOT_WIDTH
SLOT_ROWS = FRAME_HEIGHT // SLOT_HEIGHT

SMALL_PLATE = (40, 30)


@dataclass(frozen=True, eq=False)
class SyntheticCorpus:
    frames: Tuple[Frame, ...]
    plate_fixture: FixtureDoc
    char_fixture: FixtureDoc
    annotations: AnnotationDoc


def inject_confusions(text: str, classes: str, count: int, plate_format: PlateFormat, rng: random.Random) -> str:
    """
    Swaps up to count characters for the shapes they get confused with, taking only swaps the correction tables undo.
    A swap that would make correction pick a different partition is skipped.

    :param classes: the character class (LETTER or DIGIT) of every position of text
    """
    to_digit = {letter: [d for d, l in DIGIT_TO_LETTER.items() if l == letter]
                for letter in set(DIGIT_TO_LETTER.values())}
    to_letter = {digit: [l for l, d in LETTER_TO_DIGIT.items() if d == digit and l != "O"]
                 for digit in set(LETTER_TO_DIGIT.values())}

    chars = list(text)
    positions = list(range(len(text)))
    rng.shuffle(positions)
    for position in positions:
        if count == 0:
            break
        table = to_digit if classes[position] == LETTER else to_letter
        options = table.get(chars[position])
        if not options:
            continue
        original = chars[position]
        chars[position] = rng.choice(sorted(options))
        if plate_format.correct("".join(chars)).corrected != text:
            chars[position] = original
            continue
        count -= 1
    return "".join(chars)


def _spread(symbols: str, x0: float, x1: float, y_top, height: float, rng: random.Random) -> List[CharDetection]:
    """
    Evenly spaced character boxes between x0 and x1, each with its top edge at y_top() and the given height.
    """
    slot = (x1 - x0) / len(symbols)
    chars = []
    for i, symbol in enumerate(symbols):
        left = round(x0 + i * slot, 2)
        top = round(y_top(), 2)
        chars.append(CharDetection.of(symbol, left, top, round(left + 0.7 * slot, 2), round(top + height, 2),
                                      round(rng.uniform(0.6, 1.0), 4)))
    return chars


def _single_line(text: str, rng: random.Random) -> Tuple[int, int, List[CharDetection]]:
    w, h = rng.randint(160, 230), rng.randint(50, 70)
    margin = 0.05 * w
    base = 0.15 * h
    return w, h, _spread(text, margin, w - margin, lambda: base + rng.uniform(0, 3), 0.6 * h, rng)


def _double_line(first: str, second: str, rng: random.Random) -> Tuple[int, int, List[CharDetection]]:
    w, h = rng.randint(120, 160), rng.randint(100, 120)
    margin = 0.08 * w
    # the second line starts more than 0.3 * w below the lowest first-line top
    second_top = 0.3 * w + 10
    chars = _spread(first, w * 0.25, w * 0.75, lambda: rng.uniform(4, 8), 30, rng)
    chars += _spread(second, margin, w - margin, lambda: second_top + rng.uniform(0, 2), 30, rng)
    return w, h, chars


def _grid(chars: List[CharDetection], w: float, h: float, layout: GridLayout) -> CharFixture:
    sx, sy = layout.input_width / w, layout.input_height / h
    return render_grid([(char.class_id, (char.bbox.x1 + char.bbox.x2) / 2 * sx, (char.bbox.y1 + char.bbox.y2) / 2 * sy,
                         char.bbox.width * sx, char.bbox.height * sy) for char in chars], layout)


def generate_corpus(n_frames: int, seed: int = 0, max_plates: int = 4, confusion_rate: float = 0.5,
                    small_plate_rate: float = 0.0, duplicate_rate: float = 0.0, grid_fraction: float = 0.0,
                    frame_space_fraction: float = 0.0, double_line_rate: float = 0.3, plate_format: str = "sg",
                    layout: GridLayout = DEFAULT_LAYOUT) -> SyntheticCorpus:
    """
    Generates n_frames frames holding 0 to max_plates plates each.

    :param confusion_rate: chance that a plate's characters carry 1 to 3 table-covered confusions
    :param small_plate_rate: chance that a plate is 40x30, too small to read, with no character fixture
    :param duplicate_rate: chance that a plate gets a shifted, lower-scored duplicate for suppression to remove
    :param grid_fraction: share of character fixtures stored as grid tensors
    :param frame_space_fraction: share of character-list fixtures stored in frame coordinates
    """
    if not 0 <= max_plates <= SLOT_COLUMNS * SLOT_ROWS:
        raise ValueError(f"max_plates must be on [0, {SLOT_COLUMNS * SLOT_ROWS}], got {max_plates}")

    rng = random.Random(seed)
    fmt = get_plate_format(plate_format)
    frames, fixture_frames, annotated = [], [], []
    crops: Dict[str, CharFixture] = {}

    for f in range(n_frames):
        frame_id = f"syn{f:05d}"
        detections: List[BBox] = []
        plates: List[PlateAnnotation] = []

        for slot in rng.sample(range(SLOT_COLUMNS * SLOT_ROWS), rng.randint(0, max_plates)):
            slot_x, slot_y = (slot % SLOT_COLUMNS) * SLOT_WIDTH, (slot // SLOT_COLUMNS) * SLOT_HEIGHT
            score = round(rng.uniform(0.5, 1.0), 4)

            if rng.random() < small_plate_rate:
                x, y = slot_x + rng.randint(0, 100), slot_y + rng.randint(0, 100)
                box = BBox(x, y, x + SMALL_PLATE[0], y + SMALL_PLATE[1], score)
                detections.append(box)
                plates.append(PlateAnnotation(box, 1, False, None))
                continue

            plate, part = fmt.random_layout(rng)
            text = plate.text
            classes = part.classes()
            if rng.random() < confusion_rate:
                spelled = inject_confusions(text, classes, rng.randint(1, 3), fmt, rng)
            else:
                spelled = text

            if rng.random() < double_line_rate:
                lines = 2
                w, h, chars = _double_line(spelled[:part.prefix], spelled[part.prefix:], rng)
            else:
                lines = 1
                w, h, chars = _single_line(spelled, rng)

            x, y = slot_x + rng.randint(0, SLOT_WIDTH - w - 5), slot_y + rng.randint(0, SLOT_HEIGHT - h - 5)
            box = BBox(x, y, x + w, y + h, score)
            crop_id = f"{frame_id}/{len(detections)}"
            detections.append(box)
            plates.append(PlateAnnotation(box, lines, True, text))

            if rng.random() < grid_fraction:
                crops[crop_id] = _grid(chars, w, h, layout)
            elif rng.random() < frame_space_fraction:
                crops[crop_id] = CharList(tuple(char.with_bbox(char.bbox.translated(x, y)) for char in chars), "frame")
            else:
                crops[crop_id] = CharList(tuple(chars))

            if rng.random() < duplicate_rate:
                detections.append(BBox(x + 2, y + 2, x + w + 2, y + h + 2, round(score * 0.9, 4)))

        frames.append(Frame(frame_id, FRAME_WIDTH, FRAME_HEIGHT, f"synthetic://{seed}/{frame_id}"))
        fixture_frames.append(FixtureFrame(frame_id, FRAME_WIDTH, FRAME_HEIGHT, f"synthetic://{seed}/{frame_id}",
                                           tuple(detections)))
        annotated.append(AnnotatedFrame(frame_id, tuple(plates), split="train" if rng.random() < 0.8 else "test"))

    return SyntheticCorpus(tuple(frames), FixtureDoc(tuple(fixture_frames)), FixtureDoc(crops=crops),
                           AnnotationDoc(tuple(annotated)))
