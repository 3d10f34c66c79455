"""
The frame -> plates -> characters -> string flow.

Frames are processed in chunks, one stage at a time across the whole chunk:

    ingest   : plate detections for every frame
    nms      : one batched suppression over the chunk, grouped per frame
    filter   : plates under min_plate_px on either side are rejected
    decode   : character detections per crop, decoded from grid tensors where needed, mapped into crop pixels
    arrange  : line categorization and reading order
    correct  : format correction and validation

A failure while reading one plate is recorded against that plate and never aborts the frame.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from configs import PipelineConfig
from dataio.documents import CharList, CropRecord, ErrorRecord, FrameRecord, ReadingRecord, ResultsDoc
from detection import BBox, CharDetection, ContractViolation, DecodeError, GridTensor, batched_nms_indices, \
    decode_grid
from pipeline.sources import CharSource, MissingFixtureError, PlateSource
from plates import ArrangedPlate, ArrangementError, CorrectionResult, PlateFormat, arrange, get_plate_format

__all__ = ["STAGES", "Frame", "PlateCrop", "PlateReading", "PlateError", "FrameResult", "BatchTimings",
           "filter_plates", "to_crop_space", "Pipeline", "process_frame", "process_batch", "frame_record",
           "to_results_doc"]

STAGES = ("ingest", "nms", "filter", "decode", "arrange", "correct")

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class Frame:
    frame_id: str
    width: int = 1920
    height: int = 1080
    source_uri: str = ""

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ContractViolation(f"Frame {self.frame_id!r} has size {self.width}x{self.height}")


@dataclass(frozen=True)
class PlateCrop:
    """
    A plate detection that survived suppression, in frame coordinates.

    :param crop_id: "<frame_id>/<k>", k being the detection's index in the frame's raw plate detections
    """
    frame_id: str
    crop_id: str
    bbox: BBox
    recognizable: bool

    @property
    def w(self) -> float:
        return self.bbox.width

    @property
    def h(self) -> float:
        return self.bbox.height


@dataclass(frozen=True)
class PlateReading:
    crop: PlateCrop
    arranged: ArrangedPlate
    correction: CorrectionResult

    @property
    def final_string(self) -> str:
        return self.correction.corrected

    @property
    def valid(self) -> bool:
        return self.correction.valid


@dataclass(frozen=True)
class PlateError:
    crop: PlateCrop
    message: str


@dataclass(frozen=True)
class FrameResult:
    """
    Everything that happened to one frame. Every raw plate detection is counted exactly once across readings,
    rejected, errors and suppressed.
    """
    frame: Frame
    readings: Tuple[PlateReading, ...] = ()
    rejected: Tuple[PlateCrop, ...] = ()
    errors: Tuple[PlateError, ...] = ()
    suppressed: int = 0

    @property
    def frame_id(self) -> str:
        return self.frame.frame_id


def filter_plates(dets: Sequence[BBox], min_px: int = 50, frame_id: str = "",
                  indices: Optional[Sequence[int]] = None) -> Tuple[List[PlateCrop], List[PlateCrop]]:
    """
    Splits plates into those big enough to read and those that are not. A plate is kept iff both its width and its
    height are at least min_px. Input order is kept on both sides.

    :param indices: each box's index in the frame's raw detections, used for crop ids; defaults to list positions
    """
    if indices is None:
        indices = range(len(dets))
    recognizable, rejected = [], []
    for k, box in zip(indices, dets):
        ok = box.width >= min_px and box.height >= min_px
        crop = PlateCrop(frame_id, f"{frame_id}/{k}", box, ok)
        (recognizable if ok else rejected).append(crop)
    return recognizable, rejected


def to_crop_space(fixture, crop: PlateCrop, cfg: PipelineConfig) -> List[CharDetection]:
    """
    Turns whatever the character source produced for a crop into character boxes in crop pixels. Grid tensors are
    decoded and rescaled from network input size to crop size; frame-space boxes are shifted by the crop origin.
    """
    if isinstance(fixture, GridTensor):
        layout = fixture.layout
        sx, sy = crop.w / layout.input_width, crop.h / layout.input_height
        return [char.with_bbox(char.bbox.scaled(sx, sy))
                for char in decode_grid(fixture, cfg.char_conf, cfg.char_iou)]

    if isinstance(fixture, CharList):
        if fixture.space == "frame":
            return [char.with_bbox(char.bbox.translated(-crop.bbox.x1, -crop.bbox.y1))
                    for char in fixture.detections]
        return list(fixture.detections)

    return list(fixture)


@dataclass
class _Work:
    crop: PlateCrop
    chars: List[CharDetection] = field(default_factory=list)
    arranged: Optional[ArrangedPlate] = None
    correction: Optional[CorrectionResult] = None
    error: Optional[str] = None


class Pipeline:
    def __init__(self, plate_src: PlateSource, char_src: CharSource, cfg: PipelineConfig = PipelineConfig(),
                 executor: Optional[ThreadPoolExecutor] = None):
        """
        :param executor: if given, per-frame and per-plate work inside each stage is spread over it
        """
        self.plate_src = plate_src
        self.char_src = char_src
        self.cfg = cfg
        self.plate_format: PlateFormat = get_plate_format(cfg.plate_format)
        self.executor = executor

    def _map(self, func: Callable[[T], R], items: Iterable[T]) -> List[R]:
        if self.executor is None:
            return [func(item) for item in items]
        return list(self.executor.map(func, items))

    def _decode(self, work: _Work) -> None:
        try:
            work.chars = to_crop_space(self.char_src.detections(work.crop.crop_id), work.crop, self.cfg)
        except (MissingFixtureError, DecodeError) as e:
            work.error = str(e)

    def _arrange(self, work: _Work) -> None:
        if work.error is not None:
            return
        try:
            work.arranged = arrange(work.chars, work.crop.w)
        except ArrangementError as e:
            work.error = str(e)

    def _correct(self, work: _Work) -> None:
        if work.error is not None:
            return
        if self.cfg.heuristics_enabled:
            work.correction = self.plate_format.correct(work.arranged.raw_string)
        else:
            work.correction = self.plate_format.check(work.arranged.raw_string)

    def process_chunk(self, frames: Sequence[Frame],
                      stage_seconds: Optional[Dict[str, float]] = None) -> List[FrameResult]:
        """
        Runs every stage over a group of frames.

        :param stage_seconds: if given, wall-clock seconds spent in each stage are added to it
        """
        clock: Dict[str, float] = {stage: 0.0 for stage in STAGES}

        start = time.perf_counter()
        raw = self._map(lambda frame: list(self.plate_src.detections(frame.frame_id)), frames)
        clock["ingest"] += time.perf_counter() - start

        start = time.perf_counter()
        flat = [box for boxes in raw for box in boxes]
        owner = [i for i, boxes in enumerate(raw) for _ in boxes]
        offsets = np.cumsum([0] + [len(boxes) for boxes in raw]).tolist()
        kept: List[List[int]] = [[] for _ in frames]
        for index in batched_nms_indices(flat, self.cfg.det_iou, owner):
            kept[owner[index]].append(index - offsets[owner[index]])
        clock["nms"] += time.perf_counter() - start

        start = time.perf_counter()
        recognizable, rejected = [], []
        for frame, boxes, indices in zip(frames, raw, kept):
            ok, small = filter_plates([boxes[k] for k in indices], self.cfg.min_plate_px, frame.frame_id, indices)
            recognizable.append([_Work(crop) for crop in ok])
            rejected.append(small)
            for crop in small:
                logging.info(f"Rejected plate {crop.crop_id}: {crop.w:g}x{crop.h:g} is under "
                             f"{self.cfg.min_plate_px}px")
        clock["filter"] += time.perf_counter() - start

        work = [item for items in recognizable for item in items]
        for stage, step in (("decode", self._decode), ("arrange", self._arrange), ("correct", self._correct)):
            start = time.perf_counter()
            self._map(step, work)
            clock[stage] += time.perf_counter() - start

        results = []
        for frame, boxes, indices, items, small in zip(frames, raw, kept, recognizable, rejected):
            readings, errors = [], []
            for item in items:
                if item.error is not None:
                    logging.warning(f"Could not read plate {item.crop.crop_id}: {item.error}")
                    errors.append(PlateError(item.crop, item.error))
                else:
                    readings.append(PlateReading(item.crop, item.arranged, item.correction))
            results.append(FrameResult(frame, tuple(readings), tuple(small), tuple(errors),
                                       len(boxes) - len(indices)))

        if stage_seconds is not None:
            for stage, seconds in clock.items():
                stage_seconds[stage] = stage_seconds.get(stage, 0.0) + seconds
        return results


@dataclass
class BatchTimings:
    """
    Wall-clock timings of one process_batch() call.

    :param batch_seconds: wall-clock seconds per batch
    :param stage_seconds: per stage, seconds spent in it per batch
    """
    batch_size: int
    frames: int = 0
    batch_seconds: List[float] = field(default_factory=list)
    stage_seconds: Dict[str, List[float]] = field(default_factory=lambda: {stage: [] for stage in STAGES})

    @property
    def batches(self) -> int:
        return len(self.batch_seconds)

    @property
    def wall_seconds(self) -> float:
        return float(sum(self.batch_seconds))

    @property
    def fps(self) -> float:
        return self.frames / self.wall_seconds if self.wall_seconds > 0 else 0.0

    def stage_ms(self, stage: str, percentile: float = 50) -> float:
        seconds = self.stage_seconds.get(stage, [])
        if not seconds:
            return 0.0
        return float(np.percentile(seconds, percentile)) * 1000

    def to_dict(self) -> Dict[str, object]:
        return {"batch_size": self.batch_size, "frames": self.frames, "batches": self.batches,
                "wall_seconds": self.wall_seconds, "fps": self.fps,
                "stages": {stage: {"median_ms": self.stage_ms(stage, 50), "p99_ms": self.stage_ms(stage, 99)}
                           for stage in STAGES}}


def process_frame(frame: Frame, plate_src: PlateSource, char_src: CharSource,
                  cfg: PipelineConfig = PipelineConfig()) -> FrameResult:
    """
    Reads every plate in one frame. Readings come out by descending plate detection score.
    """
    return Pipeline(plate_src, char_src, cfg).process_chunk([frame])[0]


def process_batch(frames: Sequence[Frame], plate_src: PlateSource, char_src: CharSource,
                  cfg: PipelineConfig = PipelineConfig(), batch_size: int = 1,
                  jobs: Optional[int] = None) -> Tuple[List[FrameResult], BatchTimings]:
    """
    Processes frames batch_size at a time. Results are identical to calling process_frame() on each frame in turn,
    whatever the batch size or number of jobs.

    :param jobs: worker threads; cfg.jobs if None
    """
    if batch_size < 1:
        raise ContractViolation(f"Batch size must be at least 1, got {batch_size}")
    jobs = cfg.jobs if jobs is None else jobs
    if jobs < 1:
        raise ContractViolation(f"jobs must be at least 1, got {jobs}")

    timings = BatchTimings(batch_size, len(frames))
    results: List[FrameResult] = []
    executor = ThreadPoolExecutor(jobs) if jobs > 1 else None
    try:
        runner = Pipeline(plate_src, char_src, cfg, executor)
        for i in range(0, len(frames), batch_size):
            stage_seconds: Dict[str, float] = {}
            start = time.perf_counter()
            results.extend(runner.process_chunk(frames[i:i + batch_size], stage_seconds))
            timings.batch_seconds.append(time.perf_counter() - start)
            for stage in STAGES:
                timings.stage_seconds[stage].append(stage_seconds[stage])
    finally:
        if executor is not None:
            executor.shutdown()

    logging.debug(f"Processed {len(frames)} frames in {timings.batches} batches of {batch_size} "
                  f"({timings.fps:.1f} FPS)")
    return results, timings


def frame_record(result: FrameResult) -> FrameRecord:
    readings = tuple(ReadingRecord(reading.crop.crop_id, reading.crop.bbox, reading.arranged.category.label,
                                   reading.arranged.raw_string, reading.final_string, reading.valid,
                                   tuple(reading.arranged.confidences),
                                   tuple(tuple(change) for change in reading.correction.changes),
                                   tuple(reading.correction.violations))
                     for reading in result.readings)
    rejected = tuple(CropRecord(crop.crop_id, crop.bbox) for crop in result.rejected)
    errors = tuple(ErrorRecord(error.crop.crop_id, error.crop.bbox, error.message) for error in result.errors)
    return FrameRecord(result.frame_id, readings, rejected, errors, result.suppressed)


def to_results_doc(results: Sequence[FrameResult], cfg: PipelineConfig,
                   timings: Optional[BatchTimings] = None) -> ResultsDoc:
    return ResultsDoc(cfg.to_dict(), tuple(frame_record(result) for result in results),
                      timings.to_dict() if timings is not None else None)
