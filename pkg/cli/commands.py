"""
Command-line entry point: python -m cli <command> ...

    run          read every frame of a plate fixture and write a results document
    eval         score a results document against annotations
    bench        time the pipeline on a synthetic corpus across batch sizes
    decode-grid  print the characters a grid tensor decodes to
    summarize    count frames and plates in an annotation document

Exit status is 0 on success, 1 on a fatal error (unloadable input, bad config), 2 on bad usage and 3 when bench finds
results that differ between batch sizes or job counts.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from configs import PipelineConfig, PipelineSettings
from dataio import DocumentError, FixtureDoc, grid_from_json, load_annotations, load_fixture, load_results, \
    read_json, summarize, format_summary, write_json, write_results
from detection import DecodeError, GridTensor, class_to_symbol, decode_grid
from pipeline import STAGES, Frame, FixtureSource, SourceRole, frame_record, generate_corpus, process_batch, \
    to_results_doc
from plates import EvaluationError, evaluate, format_report

__all__ = ["EXIT_OK", "EXIT_FATAL", "EXIT_USAGE", "EXIT_MISMATCH", "build_parser", "main"]

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_USAGE = 2
EXIT_MISMATCH = 3

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


def _ratio_flag(name: str):
    def parse(text: str) -> float:
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}") from None
        if not 0 < value <= 1:
            raise argparse.ArgumentTypeError(f"{name} must be on (0, 1], got {value}")
        return value

    return parse


def _batch_sizes_flag(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"batch sizes must be comma separated integers, got {text!r}") from None


def _config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("pipeline config (flag > ALPR_* environment > --config file > default)")
    group.add_argument("--config", type=Path, help="JSON file of config values keyed by field name")
    group.add_argument("--det-iou", type=_ratio_flag("--det-iou"), help="plate NMS IoU threshold (default 0.5)")
    group.add_argument("--char-conf", type=_ratio_flag("--char-conf"),
                       help="grid decode confidence threshold (default 0.25)")
    group.add_argument("--char-iou", type=_ratio_flag("--char-iou"), help="character NMS IoU threshold (default 0.5)")
    group.add_argument("--min-plate-px", type=int, help="minimum plate width and height in pixels (default 50)")
    group.add_argument("--batch-sizes", type=_batch_sizes_flag, help="comma separated, e.g. 1,2,4,8,16,32")
    group.add_argument("--no-heuristics", action="store_const", const=False, dest="heuristics_enabled",
                       help="only validate strings, never rewrite them")
    group.add_argument("--jobs", type=int, help="worker threads (default 1)")
    group.add_argument("--plate-format", help="plate format rules to apply (default sg)")


def _verbosity_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    parser.add_argument("-q", "--quiet", action="store_true", help="log warnings and errors only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alpr", description="Post-inference license plate recognition pipeline.")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="read plates from detector fixtures")
    run.add_argument("plate_fixture", type=Path)
    run.add_argument("char_fixture", type=Path)
    run.add_argument("--frames", type=Path, help="text file of frame ids to process, one per line")
    run.add_argument("--out", type=Path, required=True, help="results document to write")

    evaluation = commands.add_parser("eval", help="score results against annotations")
    evaluation.add_argument("results", type=Path)
    evaluation.add_argument("annotations", type=Path)
    evaluation.add_argument("--iou", type=_ratio_flag("--iou"), default=0.5, help="matching IoU (default 0.5)")
    evaluation.add_argument("--out", type=Path, help="structured report to write")

    bench = commands.add_parser("bench", help="benchmark the pipeline on a synthetic corpus")
    bench.add_argument("--frames", type=int, default=1000, help="synthetic frames (default 1000)")
    bench.add_argument("--max-plates", type=int, default=10, help="plates per frame, at most (default 10)")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--grid-fraction", type=float, default=0.0, help="share of crops given as grid tensors")
    bench.add_argument("--out", type=Path, help="timings document to write")

    decode = commands.add_parser("decode-grid", help="print the characters a grid tensor decodes to")
    decode.add_argument("path", type=Path, help="a grid document, or a fixture document with --crop")
    decode.add_argument("--crop", help="crop id to decode from a fixture document")

    summary = commands.add_parser("summarize", help="count frames and plates in an annotation document")
    summary.add_argument("annotations", type=Path)

    for sub in (run, evaluation, bench, decode, summary):
        _config_flags(sub)
        _verbosity_flags(sub)
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.WARNING if args.quiet else logging.DEBUG if args.verbose else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def _settings(args: argparse.Namespace) -> PipelineConfig:
    flags: Dict[str, Any] = {name: getattr(args, name) for name in
                             ("det_iou", "char_conf", "char_iou", "min_plate_px", "batch_sizes", "heuristics_enabled",
                              "jobs", "plate_format")}
    return PipelineSettings(args.config, flags=flags).resolve()


def _frames_for(plates: FixtureDoc, frames_file: Optional[Path]) -> List[Frame]:
    frames = [Frame(f.frame_id, f.width, f.height, f.source_uri) for f in plates.frames]
    if frames_file is None:
        return frames
    try:
        wanted = [line.strip() for line in frames_file.read_text(encoding="utf-8").splitlines() if line.strip()]
    except OSError as e:
        raise DocumentError(f"cannot read frame list ({e.strerror or e})", frames_file) from e
    known = {frame.frame_id: frame for frame in frames}
    missing = [frame_id for frame_id in wanted if frame_id not in known]
    if missing:
        raise DocumentError(f"frames not in the plate fixture: {', '.join(missing)}", frames_file)
    return [known[frame_id] for frame_id in wanted]


def cmd_run(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    plates = load_fixture(args.plate_fixture)
    chars = load_fixture(args.char_fixture)
    frames = _frames_for(plates, args.frames)

    results, timings = process_batch(frames, FixtureSource(plates, SourceRole.PlateDetector),
                                     FixtureSource(chars, SourceRole.CharRecognizer), cfg, max(cfg.batch_sizes))
    write_results(to_results_doc(results, cfg, timings), args.out)

    read = sum(len(result.readings) for result in results)
    rejected = sum(len(result.rejected) for result in results)
    errors = sum(len(result.errors) for result in results)
    invalid = sum(1 for result in results for reading in result.readings if not reading.valid)
    print(f"{len(frames)} frames: {read} plates read ({invalid} invalid), {rejected} rejected, {errors} errors "
          f"-> {args.out}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    report = evaluate(load_results(args.results), load_annotations(args.annotations), args.iou)
    print(format_report(report))
    if args.out is not None:
        write_json({"schema": "alpr.evaluation", "version": 1, "config": cfg.to_dict(), "report": report.to_dict()},
                   args.out)
    return EXIT_OK


def _bench_table(timings) -> str:
    width = 10
    header = f"{'':<16}" + "".join(f"{'bs ' + str(t.batch_size):>{width}}" for t in timings)
    rows = [header, f"{'FPS':<16}" + "".join(f"{t.fps:>{width}.1f}" for t in timings)]
    for stage in STAGES:
        rows.append(f"{stage + ' p50 ms':<16}" + "".join(f"{t.stage_ms(stage, 50):>{width}.3f}" for t in timings))
        rows.append(f"{stage + ' p99 ms':<16}" + "".join(f"{t.stage_ms(stage, 99):>{width}.3f}" for t in timings))
    return "\n".join(rows)


def cmd_bench(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    corpus = generate_corpus(args.frames, seed=args.seed, max_plates=args.max_plates,
                             grid_fraction=args.grid_fraction, small_plate_rate=0.05, duplicate_rate=0.1,
                             plate_format=cfg.plate_format)
    plate_src = FixtureSource(corpus.plate_fixture, SourceRole.PlateDetector)
    char_src = FixtureSource(corpus.char_fixture, SourceRole.CharRecognizer)
    frames = list(corpus.frames)

    reference, _ = process_batch(frames, plate_src, char_src, cfg, cfg.batch_sizes[0], jobs=1)
    expected = [frame_record(result) for result in reference]

    all_timings = []
    mismatches = []
    for batch_size in cfg.batch_sizes:
        results, timings = process_batch(frames, plate_src, char_src, cfg, batch_size)
        logging.info(f"Batch size {batch_size}: {timings.fps:.1f} FPS over {timings.batches} batches")
        all_timings.append(timings)
        if [frame_record(result) for result in results] != expected:
            mismatches.append(f"batch size {batch_size} with {cfg.jobs} jobs")
    if cfg.jobs == 1 and len(frames) > 0:
        results, _ = process_batch(frames, plate_src, char_src, cfg, cfg.batch_sizes[-1], jobs=2)
        if [frame_record(result) for result in results] != expected:
            mismatches.append(f"batch size {cfg.batch_sizes[-1]} with 2 jobs")

    print(f"{len(frames)} synthetic frames, {cfg.jobs} job(s)")
    print(_bench_table(all_timings))
    if args.out is not None:
        write_json({"schema": "alpr.bench", "version": 1, "config": cfg.to_dict(),
                    "timings": [t.to_dict() for t in all_timings]}, args.out)

    if mismatches:
        logging.error(f"Results differ from the batch size {cfg.batch_sizes[0]} reference run: "
                      f"{'; '.join(mismatches)}")
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_decode_grid(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    if args.crop is not None:
        tensor = load_fixture(args.path).crops.get(args.crop)
        if tensor is None:
            raise DocumentError(f"no crop {args.crop!r}", args.path)
    else:
        tensor = grid_from_json(read_json(args.path), args.path)
    if not isinstance(tensor, GridTensor):
        raise DocumentError(f"crop {args.crop!r} holds character detections, not a grid tensor", args.path)

    chars = decode_grid(tensor, cfg.char_conf, cfg.char_iou)
    for char in chars:
        box = char.bbox
        row, col = char.cell
        print(f"{class_to_symbol(char.class_id)} conf={char.confidence:.4f} "
              f"box=({box.x1:.2f}, {box.y1:.2f}, {box.x2:.2f}, {box.y2:.2f}) cell=({row}, {col})")
    print(f"{len(chars)} characters")
    return EXIT_OK


def cmd_summarize(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    print(format_summary(summarize(load_annotations(args.annotations))))
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "eval": cmd_eval,
    "bench": cmd_bench,
    "decode-grid": cmd_decode_grid,
    "summarize": cmd_summarize,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    _configure_logging(args)

    try:
        cfg = _settings(args)
        return COMMANDS[args.command](args, cfg)
    except (DocumentError, EvaluationError, DecodeError, ValueError) as e:
        logging.error(str(e))
        return EXIT_FATAL
    except OSError as e:
        logging.error(f"{e.filename or ''}: {e.strerror or e}")
        return EXIT_FATAL
    except Exception as e:
        logging.error("Caught an unexpected error!", exc_info=(type(e), e, e.__traceback__))
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
