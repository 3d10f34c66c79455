"""
The three document formats of the project, all JSON with a schema name and version:

    alpr.annotations : ground truth per frame (plate boxes, line count, recognizability, plate string)
    alpr.fixture     : detector stand-ins (plate boxes per frame, characters or grid tensors per crop)
    alpr.results     : pipeline output per frame (readings, rejected crops, per-plate errors, timings)

Documents are written with sorted keys and a fixed indent, so write -> load -> write is byte-stable. Fields a loader
does not know are kept (and logged) rather than dropped.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from detection import BBox, CharDetection, ContractViolation, GridLayout, GridTensor, class_to_symbol, \
    symbol_to_class

__all__ = ["SCHEMA_VERSION", "DocumentError", "SchemaError", "PlateAnnotation", "AnnotatedFrame", "AnnotationDoc",
           "CharList", "CharFixture", "FixtureFrame", "FixtureDoc", "ReadingRecord", "CropRecord", "ErrorRecord",
           "FrameRecord", "ResultsDoc", "load_annotations", "write_annotations", "load_fixture", "write_fixture",
           "load_results", "write_results", "read_json", "write_json", "grid_to_json", "grid_from_json"]

SCHEMA_VERSION = 1
ANNOTATIONS_SCHEMA = "alpr.annotations"
FIXTURE_SCHEMA = "alpr.fixture"
RESULTS_SCHEMA = "alpr.results"
GRID_ORDER = "row-major cells, channel-contiguous: objectness, tx, ty, tw, th, 35 class logits"


class DocumentError(Exception):
    def __init__(self, message: str, path: Optional[Union[str, Path]] = None, offset: Optional[int] = None):
        """
        :param message: what went wrong, naming the offending field where there is one
        :param path: the document's file path, if it came from a file
        :param offset: byte offset of a parse error, if known
        """
        self.path = str(path) if path is not None else None
        self.offset = offset
        where = ""
        if self.path is not None:
            where = f"{self.path}: "
        if offset is not None:
            where += f"byte {offset}: "
        super().__init__(where + message)


class SchemaError(DocumentError):
    pass


# ----------------------------------------------------- Types ------------------------------------------------------ #

@dataclass(frozen=True)
class PlateAnnotation:
    bbox: BBox
    lines: int
    recognizable: bool
    plate_string: Optional[str] = None
    extras: Dict[str, Any] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class AnnotatedFrame:
    frame_id: str
    plates: Tuple[PlateAnnotation, ...] = ()
    timestamp: Optional[str] = None
    split: Optional[str] = None
    extras: Dict[str, Any] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class AnnotationDoc:
    frames: Tuple[AnnotatedFrame, ...] = ()
    extras: Dict[str, Any] = field(default_factory=dict, compare=False)

    def frame(self, frame_id: str) -> Optional[AnnotatedFrame]:
        for frame in self.frames:
            if frame.frame_id == frame_id:
                return frame
        return None


@dataclass(frozen=True)
class CharList:
    """
    Pre-decoded characters for one crop.

    :param space: "crop" if the boxes are in crop pixels, "frame" if they are in frame pixels
    :param extras: unknown fields of the stored crop
    :param char_extras: unknown fields of each stored character, parallel to detections (or empty)
    """
    detections: Tuple[CharDetection, ...]
    space: str = "crop"
    extras: Dict[str, Any] = field(default_factory=dict, compare=False)
    char_extras: Tuple[Dict[str, Any], ...] = field(default=(), compare=False)


CharFixture = Union[CharList, GridTensor]


@dataclass(frozen=True)
class FixtureFrame:
    frame_id: str
    width: int = 1920
    height: int = 1080
    source_uri: str = ""
    detections: Tuple[BBox, ...] = ()
    extras: Dict[str, Any] = field(default_factory=dict, compare=False)


@dataclass(frozen=True, eq=False)
class FixtureDoc:
    frames: Tuple[FixtureFrame, ...] = ()
    crops: Dict[str, CharFixture] = field(default_factory=dict)
    extras: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ReadingRecord:
    crop_id: str
    bbox: BBox
    category: str
    raw_string: str
    final_string: str
    valid: bool
    confidences: Tuple[float, ...] = ()
    changes: Tuple[Tuple[int, str, str], ...] = ()
    violations: Tuple[str, ...] = ()
    extras: Dict[str, Any] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class CropRecord:
    crop_id: str
    bbox: BBox
    extras: Dict[str, Any] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class ErrorRecord:
    crop_id: str
    bbox: BBox
    message: str
    extras: Dict[str, Any] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class FrameRecord:
    frame_id: str
    readings: Tuple[ReadingRecord, ...] = ()
    rejected: Tuple[CropRecord, ...] = ()
    errors: Tuple[ErrorRecord, ...] = ()
    suppressed: int = 0
    extras: Dict[str, Any] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class ResultsDoc:
    config: Dict[str, Any] = field(default_factory=dict)
    frames: Tuple[FrameRecord, ...] = ()
    timings: Optional[Dict[str, Any]] = None
    extras: Dict[str, Any] = field(default_factory=dict, compare=False)


# --------------------------------------------------- Raw JSON I/O ------------------------------------------------- #

def read_json(path: Union[str, Path]) -> Any:
    """
    Reads a JSON file, reporting parse errors with the byte offset they occurred at.

    :raises DocumentError: if the file is missing, unreadable or not JSON
    """
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise DocumentError(f"cannot read file ({e.strerror or e})", path) from e

    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise DocumentError(f"not UTF-8 ({e.reason})", path, e.start) from e

    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"parse error: {e.msg}", path, len(text[:e.pos].encode("utf-8"))) from e


def write_json(payload: Any, path: Union[str, Path]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise DocumentError(f"cannot write file ({e.strerror or e})", path) from e


# ----------------------------------------------------- Parsing ---------------------------------------------------- #

class _Reader:
    """
    Collects every problem found in a document instead of stopping at the first one.
    """

    def __init__(self, path: Optional[Union[str, Path]]):
        self.path = path
        self.problems: List[str] = []

    def fail(self, where: str, message: str) -> None:
        self.problems.append(f"{where}: {message}")

    def finish(self) -> None:
        if self.problems:
            raise SchemaError("; ".join(self.problems), self.path)

    def obj(self, value: Any, where: str) -> Dict[str, Any]:
        if not isinstance(value, dict):
            self.fail(where, f"expected an object, got {type(value).__name__}")
            return {}
        return value

    def field(self, obj: Dict[str, Any], key: str, kinds, where: str, default: Any = ...) -> Any:
        if key not in obj:
            if default is ...:
                self.fail(where, f"missing field {key!r}")
            return None if default is ... else default
        value = obj[key]
        if isinstance(value, bool) and bool not in (kinds if isinstance(kinds, tuple) else (kinds,)):
            self.fail(f"{where}.{key}", f"expected {_kind_names(kinds)}, got bool")
            return None if default is ... else default
        if not isinstance(value, kinds):
            self.fail(f"{where}.{key}", f"expected {_kind_names(kinds)}, got {type(value).__name__}")
            return None if default is ... else default
        return value

    def extras(self, obj: Dict[str, Any], known: Tuple[str, ...], where: str) -> Dict[str, Any]:
        unknown = {key: value for key, value in obj.items() if key not in known}
        if unknown:
            logging.warning(f"{self.path or '<document>'}: {where}: keeping unknown fields {sorted(unknown)}")
        return unknown

    def header(self, payload: Any, schema: str) -> Dict[str, Any]:
        top = self.obj(payload, "document")
        if top.get("schema") != schema:
            self.fail("document.schema", f"expected {schema!r}, got {top.get('schema')!r}")
        version = top.get("version")
        if version != SCHEMA_VERSION:
            self.fail("document.version", f"expected {SCHEMA_VERSION}, got {version!r}")
        return top

    def bbox(self, value: Any, where: str) -> Optional[BBox]:
        """
        A box is either [x1, y1, x2, y2] or {"box": [x1, y1, x2, y2], "score": s, "class_id": c}.
        """
        score, class_id = 1.0, 0
        if isinstance(value, dict):
            score = self.field(value, "score", (int, float), where, 1.0)
            class_id = self.field(value, "class_id", int, where, 0)
            value = value.get("box")
        if not (isinstance(value, list) and len(value) == 4 and
                all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
            self.fail(where, f"expected a box [x1, y1, x2, y2], got {value!r}")
            return None
        try:
            return BBox(*(float(v) for v in value), float(score if score is not None else 1.0),
                        class_id if class_id is not None else 0)
        except ContractViolation as e:
            self.fail(where, str(e))
            return None


def _kind_names(kinds) -> str:
    kinds = kinds if isinstance(kinds, tuple) else (kinds,)
    return " or ".join(kind.__name__ for kind in kinds)


def _box_json(box: BBox) -> Dict[str, Any]:
    return {"box": [box.x1, box.y1, box.x2, box.y2], "score": box.score, "class_id": box.class_id}


# --------------------------------------------------- Annotations -------------------------------------------------- #

_PLATE_KEYS = ("bbox", "lines", "recognizable", "plate_string")
_ANNOTATED_FRAME_KEYS = ("frame_id", "plates", "timestamp", "split")
_DOC_KEYS = ("schema", "version", "frames")


def annotations_from_json(payload: Any, path: Optional[Union[str, Path]] = None) -> AnnotationDoc:
    reader = _Reader(path)
    top = reader.header(payload, ANNOTATIONS_SCHEMA)
    frames = []
    for i, raw_frame in enumerate(reader.field(top, "frames", list, "document", []) or []):
        where = f"frames[{i}]"
        raw_frame = reader.obj(raw_frame, where)
        frame_id = reader.field(raw_frame, "frame_id", str, where)
        plates = []
        for j, raw_plate in enumerate(reader.field(raw_frame, "plates", list, where, []) or []):
            plate_where = f"{where}.plates[{j}]"
            raw_plate = reader.obj(raw_plate, plate_where)
            bbox = reader.bbox(raw_plate.get("bbox"), f"{plate_where}.bbox")
            lines = reader.field(raw_plate, "lines", int, plate_where)
            if lines is not None and lines not in (1, 2):
                reader.fail(f"{plate_where}.lines", f"expected 1 or 2, got {lines}")
            recognizable = reader.field(raw_plate, "recognizable", bool, plate_where)
            plate_string = reader.field(raw_plate, "plate_string", (str, type(None)), plate_where, None)
            if recognizable and not plate_string:
                reader.fail(plate_where, "recognizable plate is missing its plate_string")
            if bbox is not None and lines in (1, 2) and recognizable is not None:
                plates.append(PlateAnnotation(bbox, lines, recognizable, plate_string,
                                              reader.extras(raw_plate, _PLATE_KEYS, plate_where)))
        frames.append(AnnotatedFrame(frame_id, tuple(plates),
                                     reader.field(raw_frame, "timestamp", (str, type(None)), where, None),
                                     reader.field(raw_frame, "split", (str, type(None)), where, None),
                                     reader.extras(raw_frame, _ANNOTATED_FRAME_KEYS, where)))
    extras = reader.extras(top, _DOC_KEYS, "document")
    reader.finish()
    return AnnotationDoc(tuple(frames), extras)


def annotations_to_json(doc: AnnotationDoc) -> Dict[str, Any]:
    frames = []
    for frame in doc.frames:
        plates = []
        for plate in frame.plates:
            plates.append({**plate.extras, "bbox": [plate.bbox.x1, plate.bbox.y1, plate.bbox.x2, plate.bbox.y2],
                           "lines": plate.lines, "recognizable": plate.recognizable,
                           "plate_string": plate.plate_string})
        frames.append({**frame.extras, "frame_id": frame.frame_id, "timestamp": frame.timestamp,
                       "split": frame.split, "plates": plates})
    return {**doc.extras, "schema": ANNOTATIONS_SCHEMA, "version": SCHEMA_VERSION, "frames": frames}


def load_annotations(path: Union[str, Path]) -> AnnotationDoc:
    """
    :raises DocumentError: if the file is missing or not JSON
    :raises SchemaError: listing every malformed field, by its path in the document
    """
    return annotations_from_json(read_json(path), path)


def write_annotations(doc: AnnotationDoc, path: Union[str, Path]) -> None:
    write_json(annotations_to_json(doc), path)


# ---------------------------------------------------- Fixtures ---------------------------------------------------- #

_FIXTURE_FRAME_KEYS = ("frame_id", "width", "height", "source_uri", "detections")
_FIXTURE_KEYS = ("schema", "version", "frames", "crops")


_GRID_KEYS = ("kind", "layout", "shape", "values")
_LAYOUT_KEYS = ("input_width", "input_height", "stride", "order")
_CHAR_LIST_KEYS = ("kind", "space", "detections")
_CHAR_KEYS = ("box", "symbol", "confidence")


def grid_to_json(tensor: GridTensor) -> Dict[str, Any]:
    layout = tensor.layout
    return {**tensor.extras, "kind": "grid",
            "layout": {**tensor.layout_extras, "input_width": layout.input_width,
                       "input_height": layout.input_height, "stride": layout.stride, "order": GRID_ORDER},
            "shape": list(layout.shape),
            "values": tensor.flat()}


def grid_from_json(payload: Any, path: Optional[Union[str, Path]] = None, where: str = "grid") -> GridTensor:
    reader = _Reader(path)
    tensor = _grid(reader, reader.obj(payload, where), where)
    reader.finish()
    return tensor


def _grid(reader: _Reader, raw: Dict[str, Any], where: str) -> Optional[GridTensor]:
    raw_layout = reader.obj(raw.get("layout", {}), f"{where}.layout")
    try:
        layout = GridLayout(int(raw_layout.get("input_width", 288)), int(raw_layout.get("input_height", 200)),
                            int(raw_layout.get("stride", 8)))
    except (ContractViolation, TypeError, ValueError) as e:
        reader.fail(f"{where}.layout", str(e))
        return None
    shape = reader.field(raw, "shape", list, where)
    if shape is not None and tuple(shape) != layout.shape:
        reader.fail(f"{where}.shape", f"layout declares {list(layout.shape)}, payload declares {shape}")
        return None
    values = reader.field(raw, "values", list, where)
    if values is None:
        return None
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        reader.fail(f"{where}.values", "expected numbers only")
        return None
    try:
        tensor = GridTensor.from_flat(values, layout)
    except ContractViolation as e:
        reader.fail(f"{where}.values", str(e))
        return None
    return GridTensor(tensor.values, layout, reader.extras(raw, _GRID_KEYS, where),
                      reader.extras(raw_layout, _LAYOUT_KEYS, f"{where}.layout"))


def _char_list(reader: _Reader, raw: Dict[str, Any], where: str) -> Optional[CharList]:
    space = reader.field(raw, "space", str, where, "crop")
    if space not in ("crop", "frame"):
        reader.fail(f"{where}.space", f"expected 'crop' or 'frame', got {space!r}")
        return None
    chars, char_extras = [], []
    for k, raw_char in enumerate(reader.field(raw, "detections", list, where, []) or []):
        char_where = f"{where}.detections[{k}]"
        raw_char = reader.obj(raw_char, char_where)
        symbol = reader.field(raw_char, "symbol", str, char_where)
        confidence = reader.field(raw_char, "confidence", (int, float), char_where, 1.0)
        try:
            class_id = symbol_to_class(symbol) if symbol is not None else None
        except ContractViolation as e:
            reader.fail(f"{char_where}.symbol", str(e))
            continue
        box = reader.bbox({"box": raw_char.get("box"), "score": confidence, "class_id": class_id or 0}, char_where)
        if box is not None and class_id is not None:
            chars.append(CharDetection(box))
            char_extras.append(reader.extras(raw_char, _CHAR_KEYS, char_where))
    return CharList(tuple(chars), space, reader.extras(raw, _CHAR_LIST_KEYS, where), tuple(char_extras))


def _char_list_json(chars: CharList) -> Dict[str, Any]:
    extras = chars.char_extras or ({},) * len(chars.detections)
    return {**chars.extras, "kind": "detections", "space": chars.space,
            "detections": [{**char_extra, "box": list(char.bbox.as_tuple()), "symbol": class_to_symbol(char.class_id),
                            "confidence": char.confidence} for char, char_extra in zip(chars.detections, extras)]}


def fixture_from_json(payload: Any, path: Optional[Union[str, Path]] = None) -> FixtureDoc:
    reader = _Reader(path)
    top = reader.header(payload, FIXTURE_SCHEMA)

    frames = []
    for i, raw_frame in enumerate(reader.field(top, "frames", list, "document", []) or []):
        where = f"frames[{i}]"
        raw_frame = reader.obj(raw_frame, where)
        detections = []
        for j, raw_box in enumerate(reader.field(raw_frame, "detections", list, where, []) or []):
            box = reader.bbox(raw_box, f"{where}.detections[{j}]")
            if box is not None:
                detections.append(box)
        frames.append(FixtureFrame(reader.field(raw_frame, "frame_id", str, where),
                                   reader.field(raw_frame, "width", int, where, 1920),
                                   reader.field(raw_frame, "height", int, where, 1080),
                                   reader.field(raw_frame, "source_uri", str, where, ""),
                                   tuple(detections),
                                   reader.extras(raw_frame, _FIXTURE_FRAME_KEYS, where)))

    crops: Dict[str, CharFixture] = {}
    for crop_id, raw_crop in (reader.field(top, "crops", dict, "document", {}) or {}).items():
        where = f"crops[{crop_id!r}]"
        raw_crop = reader.obj(raw_crop, where)
        kind = raw_crop.get("kind")
        if kind == "grid":
            fixture = _grid(reader, raw_crop, where)
        elif kind == "detections":
            fixture = _char_list(reader, raw_crop, where)
        else:
            reader.fail(f"{where}.kind", f"expected 'grid' or 'detections', got {kind!r}")
            fixture = None
        if fixture is not None:
            crops[crop_id] = fixture

    extras = reader.extras(top, _FIXTURE_KEYS, "document")
    reader.finish()
    return FixtureDoc(tuple(frames), crops, extras)


def fixture_to_json(doc: FixtureDoc) -> Dict[str, Any]:
    frames = [{**frame.extras, "frame_id": frame.frame_id, "width": frame.width, "height": frame.height,
               "source_uri": frame.source_uri, "detections": [_box_json(box) for box in frame.detections]}
              for frame in doc.frames]
    crops = {}
    for crop_id, fixture in doc.crops.items():
        if isinstance(fixture, GridTensor):
            crops[crop_id] = grid_to_json(fixture)
        else:
            crops[crop_id] = _char_list_json(fixture)
    return {**doc.extras, "schema": FIXTURE_SCHEMA, "version": SCHEMA_VERSION, "frames": frames, "crops": crops}


def load_fixture(path: Union[str, Path]) -> FixtureDoc:
    doc = fixture_from_json(read_json(path), path)
    logging.info(f"Fixture {path} parsed correctly ({len(doc.frames)} frames, {len(doc.crops)} crops).")
    return doc


def write_fixture(doc: FixtureDoc, path: Union[str, Path]) -> None:
    write_json(fixture_to_json(doc), path)


# ----------------------------------------------------- Results ---------------------------------------------------- #

_READING_KEYS = ("crop_id", "bbox", "category", "raw_string", "final_string", "valid", "confidences", "changes",
                 "violations")
_CROP_KEYS = ("crop_id", "bbox")
_ERROR_KEYS = ("crop_id", "bbox", "message")
_RESULT_FRAME_KEYS = ("frame_id", "readings", "rejected", "errors", "suppressed")
_RESULTS_KEYS = ("schema", "version", "config", "frames", "timings")


def results_from_json(payload: Any, path: Optional[Union[str, Path]] = None) -> ResultsDoc:
    reader = _Reader(path)
    top = reader.header(payload, RESULTS_SCHEMA)

    frames = []
    for i, raw_frame in enumerate(reader.field(top, "frames", list, "document", []) or []):
        where = f"frames[{i}]"
        raw_frame = reader.obj(raw_frame, where)

        readings = []
        for j, raw in enumerate(reader.field(raw_frame, "readings", list, where, []) or []):
            reading_where = f"{where}.readings[{j}]"
            raw = reader.obj(raw, reading_where)
            changes = []
            for change in reader.field(raw, "changes", list, reading_where, []) or []:
                if not (isinstance(change, list) and len(change) == 3 and isinstance(change[0], int)):
                    reader.fail(f"{reading_where}.changes", f"expected [position, from, to], got {change!r}")
                    continue
                changes.append((change[0], str(change[1]), str(change[2])))
            readings.append(ReadingRecord(
                reader.field(raw, "crop_id", str, reading_where),
                reader.bbox(raw.get("bbox"), f"{reading_where}.bbox"),
                reader.field(raw, "category", str, reading_where),
                reader.field(raw, "raw_string", str, reading_where),
                reader.field(raw, "final_string", str, reading_where),
                reader.field(raw, "valid", bool, reading_where),
                tuple(float(c) for c in reader.field(raw, "confidences", list, reading_where, []) or []),
                tuple(changes),
                tuple(reader.field(raw, "violations", list, reading_where, []) or []),
                reader.extras(raw, _READING_KEYS, reading_where)))

        rejected = []
        for j, raw in enumerate(reader.field(raw_frame, "rejected", list, where, []) or []):
            crop_where = f"{where}.rejected[{j}]"
            raw = reader.obj(raw, crop_where)
            rejected.append(CropRecord(reader.field(raw, "crop_id", str, crop_where),
                                       reader.bbox(raw.get("bbox"), f"{crop_where}.bbox"),
                                       reader.extras(raw, _CROP_KEYS, crop_where)))

        errors = []
        for j, raw in enumerate(reader.field(raw_frame, "errors", list, where, []) or []):
            error_where = f"{where}.errors[{j}]"
            raw = reader.obj(raw, error_where)
            errors.append(ErrorRecord(reader.field(raw, "crop_id", str, error_where),
                                      reader.bbox(raw.get("bbox"), f"{error_where}.bbox"),
                                      reader.field(raw, "message", str, error_where),
                                      reader.extras(raw, _ERROR_KEYS, error_where)))

        frames.append(FrameRecord(reader.field(raw_frame, "frame_id", str, where), tuple(readings), tuple(rejected),
                                  tuple(errors), reader.field(raw_frame, "suppressed", int, where, 0),
                                  reader.extras(raw_frame, _RESULT_FRAME_KEYS, where)))

    config = reader.field(top, "config", dict, "document", {})
    timings = reader.field(top, "timings", (dict, type(None)), "document", None)
    extras = reader.extras(top, _RESULTS_KEYS, "document")
    reader.finish()
    return ResultsDoc(config, tuple(frames), timings, extras)


def _reading_json(reading: ReadingRecord) -> Dict[str, Any]:
    return {**reading.extras, "crop_id": reading.crop_id, "bbox": _box_json(reading.bbox),
            "category": reading.category, "raw_string": reading.raw_string, "final_string": reading.final_string,
            "valid": reading.valid, "confidences": list(reading.confidences),
            "changes": [list(change) for change in reading.changes], "violations": list(reading.violations)}


def results_to_json(doc: ResultsDoc) -> Dict[str, Any]:
    frames = []
    for frame in doc.frames:
        frames.append({**frame.extras, "frame_id": frame.frame_id,
                       "readings": [_reading_json(reading) for reading in frame.readings],
                       "rejected": [{**crop.extras, "crop_id": crop.crop_id, "bbox": _box_json(crop.bbox)}
                                    for crop in frame.rejected],
                       "errors": [{**error.extras, "crop_id": error.crop_id, "bbox": _box_json(error.bbox),
                                   "message": error.message} for error in frame.errors],
                       "suppressed": frame.suppressed})
    payload = {**doc.extras, "schema": RESULTS_SCHEMA, "version": SCHEMA_VERSION, "config": doc.config,
               "frames": frames}
    if doc.timings is not None:
        payload["timings"] = doc.timings
    return payload


def load_results(path: Union[str, Path]) -> ResultsDoc:
    return results_from_json(read_json(path), path)


def write_results(doc: ResultsDoc, path: Union[str, Path]) -> None:
    write_json(results_to_json(doc), path)
