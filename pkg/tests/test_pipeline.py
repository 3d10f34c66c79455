import math

import pytest

from configs import PipelineConfig
from dataio import CharList, FixtureDoc, FixtureFrame, load_results
from detection import BBox, CharDetection, ContractViolation, GridTensor, render_grid, symbol_to_class
from pipeline import Frame, FixtureSource, MissingFixtureError, SourceRole, filter_plates, frame_record, \
    generate_corpus, process_batch, process_frame, to_crop_space, to_results_doc
from plates import LineCategory


def sources(frames, crops):
    return (FixtureSource(FixtureDoc(tuple(frames)), SourceRole.PlateDetector),
            FixtureSource(FixtureDoc(crops=crops), SourceRole.CharRecognizer))


def spelled(text, conf=0.9):
    return CharList(tuple(CharDetection.of(symbol, 6 + 13 * i, 10, 16 + 13 * i, 46, conf)
                          for i, symbol in enumerate(text)))


class TestFilterPlates:
    def test_thin_plate_is_rejected(self):
        ok, rejected = filter_plates([BBox(0, 0, 49, 120)])
        assert ok == []
        assert rejected[0].w == 49
        assert not rejected[0].recognizable

    def test_boundary_is_kept(self):
        ok, rejected = filter_plates([BBox(0, 0, 50, 50)])
        assert len(ok) == 1 and rejected == []
        assert ok[0].recognizable

    def test_empty(self):
        assert filter_plates([]) == ([], [])

    def test_crop_ids_use_raw_indices(self):
        ok, rejected = filter_plates([BBox(0, 0, 100, 60), BBox(0, 0, 10, 10)], 50, "f7", [3, 5])
        assert [c.crop_id for c in ok] == ["f7/3"]
        assert [c.crop_id for c in rejected] == ["f7/5"]


class TestSources:
    def test_missing_crop(self, char_source):
        with pytest.raises(MissingFixtureError) as error:
            char_source.detections("f009/0")
        assert str(error.value) == "no char_recognizer fixture for 'f009/0'"

    def test_missing_frame(self, plate_source):
        with pytest.raises(KeyError):
            plate_source.detections("nope")

    def test_frame_lookup(self, plate_source):
        assert len(plate_source.detections("f001")) == 3


class TestToCropSpace:
    def test_grid_is_rescaled_to_crop_pixels(self):
        crop = filter_plates([BBox(100, 100, 244, 200)])[0][0]
        tensor = render_grid([(symbol_to_class("S"), 100.0, 60.0, 20.0, 40.0)])
        (char,) = to_crop_space(tensor, crop, PipelineConfig())
        assert char.bbox.center == pytest.approx((50.0, 30.0), abs=1e-6)
        assert (char.bbox.width, char.bbox.height) == pytest.approx((10.0, 20.0))

    def test_frame_space_is_shifted_by_crop_origin(self):
        crop = filter_plates([BBox(100, 200, 280, 260)])[0][0]
        chars = CharList((CharDetection.of("A", 110, 210, 125, 246),), "frame")
        (char,) = to_crop_space(chars, crop, PipelineConfig())
        assert char.bbox.as_tuple() == (10, 10, 25, 46)


class TestProcessFrame:
    def test_no_plates(self):
        plates, chars = sources([FixtureFrame("f1")], {})
        result = process_frame(Frame("f1"), plates, chars)
        assert result.readings == () and result.rejected == () and result.errors == ()

    def test_single_plate_is_corrected(self):
        plates, chars = sources([FixtureFrame("f1", detections=(BBox(10, 10, 130, 70, 0.9),))],
                                {"f1/0": spelled("5BA1234E")})
        (reading,) = process_frame(Frame("f1"), plates, chars).readings
        assert reading.arranged.raw_string == "5BA1234E"
        assert reading.final_string == "SBA1234E"
        assert reading.valid
        assert reading.arranged.category is LineCategory.SingleLineLP

    def test_small_plate_is_reported_not_read(self):
        plates, chars = sources([FixtureFrame("f1", detections=(BBox(10, 10, 130, 70, 0.9),
                                                                BBox(500, 500, 540, 530, 0.8)))],
                                {"f1/0": spelled("SBA1234E")})
        result = process_frame(Frame("f1"), plates, chars)
        assert len(result.readings) == 1
        assert [crop.crop_id for crop in result.rejected] == ["f1/1"]

    def test_one_bad_plate_does_not_abort_the_frame(self):
        plates, chars = sources([FixtureFrame("f1", detections=(BBox(10, 10, 130, 70, 0.9),
                                                                BBox(300, 10, 420, 70, 0.95),
                                                                BBox(600, 10, 720, 70, 0.5)))],
                                {"f1/0": spelled("SBA1234E"), "f1/2": CharList(())})
        result = process_frame(Frame("f1"), plates, chars)
        assert [r.crop.crop_id for r in result.readings] == ["f1/0"]
        assert {e.crop.crop_id: e.message for e in result.errors} == {
            "f1/1": "no char_recognizer fixture for 'f1/1'",
            "f1/2": "Cannot arrange a plate with no characters"}

    def test_non_finite_grid_is_a_per_plate_error(self):
        values = render_grid([(1, 50.0, 50.0, 10.0, 10.0)]).values.copy()
        values[0, 0, 0] = math.inf
        plates, chars = sources([FixtureFrame("f1", detections=(BBox(10, 10, 130, 70, 0.9),))],
                                {"f1/0": GridTensor(values)})
        (error,) = process_frame(Frame("f1"), plates, chars).errors
        assert "non-finite" in error.message

    def test_readings_by_descending_score(self):
        plates, chars = sources([FixtureFrame("f1", detections=(BBox(10, 10, 130, 70, 0.6),
                                                                BBox(300, 10, 420, 70, 0.95)))],
                                {"f1/0": spelled("SBA1234E"), "f1/1": spelled("SGX1234A")})
        readings = process_frame(Frame("f1"), plates, chars).readings
        assert [r.final_string for r in readings] == ["SGX1234A", "SBA1234E"]

    def test_heuristics_disabled_only_checks(self):
        plates, chars = sources([FixtureFrame("f1", detections=(BBox(10, 10, 130, 70, 0.9),))],
                                {"f1/0": spelled("5BA1234E")})
        (reading,) = process_frame(Frame("f1"), plates, chars, PipelineConfig(heuristics_enabled=False)).readings
        assert reading.final_string == "5BA1234E"
        assert reading.correction.changes == ()
        assert not reading.valid

    def test_golden_frames(self, plate_source, char_source, fixtures_dir):
        frames = [Frame("f001"), Frame("f002"), Frame("f003")]
        results = [process_frame(frame, plate_source, char_source) for frame in frames]
        golden = load_results(fixtures_dir / "golden_results.json")
        assert tuple(frame_record(result) for result in results) == golden.frames

    def test_every_detection_is_accounted_for(self, plate_source, char_source):
        for frame_id, raw in (("f001", 3), ("f002", 2), ("f003", 0)):
            result = process_frame(Frame(frame_id), plate_source, char_source)
            assert len(result.readings) + len(result.rejected) + len(result.errors) + result.suppressed == raw

    def test_frame_size_must_be_positive(self):
        with pytest.raises(ContractViolation):
            Frame("f1", 0, 720)


class TestProcessBatch:
    def test_batch_of_one_matches_process_frame(self, plate_source, char_source):
        frame = Frame("f001")
        results, timings = process_batch([frame], plate_source, char_source, PipelineConfig(), 1)
        assert results == [process_frame(frame, plate_source, char_source)]
        assert timings.batches == 1
        assert timings.frames == 1

    def test_empty(self, plate_source, char_source):
        results, timings = process_batch([], plate_source, char_source, PipelineConfig(), 4)
        assert results == []
        assert timings.fps == 0.0
        assert timings.stage_ms("nms") == 0.0
        assert timings.to_dict()["batches"] == 0

    def test_batch_size_must_be_positive(self, plate_source, char_source):
        with pytest.raises(ContractViolation):
            process_batch([], plate_source, char_source, PipelineConfig(), 0)

    def test_results_do_not_depend_on_batch_size_or_jobs(self):
        corpus = generate_corpus(32, seed=4, max_plates=6, small_plate_rate=0.1, duplicate_rate=0.2,
                                 grid_fraction=0.3, frame_space_fraction=0.3)
        plates = FixtureSource(corpus.plate_fixture, SourceRole.PlateDetector)
        chars = FixtureSource(corpus.char_fixture, SourceRole.CharRecognizer)
        frames = list(corpus.frames)

        expected = [frame_record(r) for r in process_batch(frames, plates, chars, PipelineConfig(), 1)[0]]
        for batch_size, jobs in ((32, 1), (5, 1), (32, 4), (3, 2)):
            results, timings = process_batch(frames, plates, chars, PipelineConfig(), batch_size, jobs)
            assert [frame_record(r) for r in results] == expected
            assert timings.batches == math.ceil(32 / batch_size)
            assert set(timings.stage_seconds) == {"ingest", "nms", "filter", "decode", "arrange", "correct"}

    def test_exact_threshold_plates_do_not_depend_on_batch_size(self):
        frames, crops = [], {}
        for k in range(32):
            x, y = 100.3 + 1.7 * k, 50.1 + 2.3 * k
            w, h = 160.7 + 0.37 * k, 120.9 + 0.53 * k
            frame_id = f"f{k:02d}"
            frames.append(FixtureFrame(frame_id, detections=(BBox(x, y, x + w, y + h, 0.9),
                                                             BBox(x, y, x + w, y + h / 2, 0.8))))
            crops[f"{frame_id}/0"] = spelled("SBA1234E")
            crops[f"{frame_id}/1"] = spelled("SGX1234A")
        plates, chars = sources(frames, crops)
        ids = [Frame(f.frame_id) for f in frames]

        single = [frame_record(r) for r in process_batch(ids, plates, chars, PipelineConfig(), 1)[0]]
        batched = [frame_record(r) for r in process_batch(ids, plates, chars, PipelineConfig(), 32)[0]]
        assert batched == single

    def test_results_document(self, plate_source, char_source):
        results, timings = process_batch([Frame("f001")], plate_source, char_source, PipelineConfig(), 2)
        doc = to_results_doc(results, PipelineConfig(jobs=2), timings)
        assert doc.config["jobs"] == 2
        assert doc.timings["batch_size"] == 2
        assert doc.frames[0].suppressed == 1
