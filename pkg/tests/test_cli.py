import json

import numpy as np
import pytest

from cli import EXIT_FATAL, EXIT_OK, EXIT_USAGE, main
from dataio import grid_to_json, load_results, write_annotations, write_fixture, write_json
from detection import DEFAULT_LAYOUT, GridTensor
from detection.griddecode import BOX_CHANNELS, COLD_LOGIT, HOT_LOGIT
from pipeline import generate_corpus


def run_golden(fixtures_dir, out, *extra):
    return main(["run", str(fixtures_dir / "golden_plates.json"), str(fixtures_dir / "golden_chars.json"),
                 "--out", str(out), *extra])


class TestRun:
    def test_golden_corpus(self, fixtures_dir, tmp_path, capsys):
        out = tmp_path / "results.json"
        assert run_golden(fixtures_dir, out) == EXIT_OK
        golden = load_results(fixtures_dir / "golden_results.json")
        produced = load_results(out)
        assert produced.frames == golden.frames
        assert produced.config == golden.config
        assert set(produced.timings) == {"batch_size", "frames", "batches", "wall_seconds", "fps", "stages"}
        assert produced.timings["frames"] == 3
        assert set(produced.timings["stages"]) == {"ingest", "nms", "filter", "decode", "arrange", "correct"}
        assert "3 frames: 2 plates read (0 invalid), 1 rejected, 1 errors" in capsys.readouterr().out

    def test_output_is_deterministic(self, fixtures_dir, tmp_path):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        assert run_golden(fixtures_dir, first) == EXIT_OK
        assert run_golden(fixtures_dir, second, "--jobs", "3", "--batch-sizes", "1,2") == EXIT_OK
        assert load_results(first).frames == load_results(second).frames

    def test_no_heuristics(self, fixtures_dir, tmp_path):
        out = tmp_path / "results.json"
        assert run_golden(fixtures_dir, out, "--no-heuristics") == EXIT_OK
        doc = load_results(out)
        reading = doc.frames[0].readings[0]
        assert reading.final_string == reading.raw_string == "5BA1234E"
        assert reading.changes == ()
        assert not doc.config["heuristics_enabled"]

    def test_frame_list(self, fixtures_dir, tmp_path):
        out = tmp_path / "results.json"
        assert run_golden(fixtures_dir, out, "--frames", str(fixtures_dir / "golden_frames.txt")) == EXIT_OK
        assert [frame.frame_id for frame in load_results(out).frames] == ["f002", "f001"]

    def test_empty_frame_list(self, fixtures_dir, tmp_path):
        frames = tmp_path / "frames.txt"
        frames.write_text("")
        out = tmp_path / "results.json"
        assert run_golden(fixtures_dir, out, "--frames", str(frames)) == EXIT_OK
        assert load_results(out).frames == ()

    def test_unknown_frame_in_list(self, fixtures_dir, tmp_path):
        frames = tmp_path / "frames.txt"
        frames.write_text("f404\n")
        assert run_golden(fixtures_dir, tmp_path / "r.json", "--frames", str(frames)) == EXIT_FATAL

    def test_unloadable_fixture(self, fixtures_dir, tmp_path):
        broken = tmp_path / "broken.json"
        broken.write_text("{")
        assert main(["run", str(broken), str(fixtures_dir / "golden_chars.json"),
                     "--out", str(tmp_path / "r.json")]) == EXIT_FATAL

    def test_config_file_and_flag_precedence(self, fixtures_dir, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"min_plate_px": 30, "det_iou": 0.9}))
        out = tmp_path / "results.json"
        assert run_golden(fixtures_dir, out, "--config", str(config), "--det-iou", "0.5") == EXIT_OK
        doc = load_results(out)
        assert doc.config["min_plate_px"] == 30
        assert doc.config["det_iou"] == 0.5
        # the 40x30 plate now passes the size filter but has no characters
        assert [error.crop_id for error in doc.frames[0].errors] == ["f001/1"]

    def test_environment(self, fixtures_dir, tmp_path, monkeypatch):
        monkeypatch.setenv("ALPR_MIN_PLATE_PX", "200")
        out = tmp_path / "results.json"
        assert run_golden(fixtures_dir, out) == EXIT_OK
        doc = load_results(out)
        assert doc.config["min_plate_px"] == 200
        assert all(frame.readings == () for frame in doc.frames)

    def test_bad_flag(self, fixtures_dir, tmp_path):
        assert run_golden(fixtures_dir, tmp_path / "r.json", "--det-iou", "2") == EXIT_USAGE

    def test_bad_config(self, fixtures_dir, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"batch_sizes": [4, 2]}))
        assert run_golden(fixtures_dir, tmp_path / "r.json", "--config", str(config)) == EXIT_FATAL

    def test_unknown_plate_format(self, fixtures_dir, tmp_path):
        assert run_golden(fixtures_dir, tmp_path / "r.json", "--plate-format", "zz") == EXIT_FATAL


class TestEval:
    def test_golden(self, fixtures_dir, tmp_path, capsys):
        results = tmp_path / "results.json"
        assert run_golden(fixtures_dir, results) == EXIT_OK
        capsys.readouterr()
        report = tmp_path / "report.json"
        assert main(["eval", str(results), str(fixtures_dir / "golden_annotations.json"), "--out", str(report)]) \
            == EXIT_OK
        printed = capsys.readouterr().out
        assert "precision 100.00%" in printed

        payload = json.loads(report.read_text())["report"]
        assert payload["detection"]["precision"] == pytest.approx(1.0)
        for key in ("accuracy", "accuracy_1", "accuracy_2"):
            assert payload["recognition"][key] == pytest.approx(2 / 3)
        assert payload["by_lines"]["double"]["accuracy"] == pytest.approx(1.0)

    def test_frame_without_annotations(self, fixtures_dir, tmp_path):
        annotations = tmp_path / "a.json"
        write_json({"schema": "alpr.annotations", "version": 1, "frames": []}, annotations)
        assert main(["eval", str(fixtures_dir / "golden_results.json"), str(annotations)]) == EXIT_FATAL


class TestBench:
    def test_two_batch_sizes(self, tmp_path, capsys):
        out = tmp_path / "bench.json"
        assert main(["bench", "--frames", "64", "--batch-sizes", "1,32", "--grid-fraction", "0.2",
                     "--out", str(out)]) == EXIT_OK
        header = capsys.readouterr().out.splitlines()[1]
        assert header.split() == ["bs", "1", "bs", "32"]
        timings = json.loads(out.read_text())["timings"]
        assert [t["batch_size"] for t in timings] == [1, 32]
        assert all(t["frames"] == 64 for t in timings)

    def test_single_size(self, capsys):
        assert main(["bench", "--frames", "8", "--batch-sizes", "1"]) == EXIT_OK
        assert capsys.readouterr().out.splitlines()[1].split() == ["bs", "1"]

    def test_no_frames(self, capsys):
        assert main(["bench", "--frames", "0", "--batch-sizes", "1,4"]) == EXIT_OK
        fps = capsys.readouterr().out.splitlines()[2].split()
        assert fps == ["FPS", "0.0", "0.0"]


class TestDecodeGrid:
    def hot_cell_tensor(self):
        values = np.full(DEFAULT_LAYOUT.shape, COLD_LOGIT)
        values[3, 5, 0] = HOT_LOGIT
        values[3, 5, 1:BOX_CHANNELS] = 0.0
        values[3, 5, BOX_CHANNELS + 10] = HOT_LOGIT
        return GridTensor(values)

    def test_grid_document(self, tmp_path, capsys):
        path = tmp_path / "grid.json"
        write_json(grid_to_json(self.hot_cell_tensor()), path)
        assert main(["decode-grid", str(path)]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("A conf=")
        assert "box=(40.00, 24.00, 48.00, 32.00) cell=(3, 5)" in lines[0]
        assert lines[-1] == "1 characters"

    def test_silent_tensor(self, tmp_path, capsys):
        path = tmp_path / "grid.json"
        write_json(grid_to_json(GridTensor(np.full(DEFAULT_LAYOUT.shape, COLD_LOGIT))), path)
        assert main(["decode-grid", str(path)]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "0 characters"

    def test_crop_from_fixture(self, tmp_path, capsys):
        corpus = generate_corpus(10, seed=2, max_plates=4, grid_fraction=1.0)
        path = tmp_path / "chars.json"
        write_fixture(corpus.char_fixture, path)
        crop_id = sorted(corpus.char_fixture.crops)[0]
        assert main(["decode-grid", str(path), "--crop", crop_id]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert int(lines[-1].split()[0]) == len(lines) - 1 > 0

    def test_crop_holding_detections(self, fixtures_dir):
        assert main(["decode-grid", str(fixtures_dir / "golden_chars.json"), "--crop", "f001/0"]) == EXIT_FATAL

    def test_missing_crop(self, fixtures_dir):
        assert main(["decode-grid", str(fixtures_dir / "golden_chars.json"), "--crop", "f404/0"]) == EXIT_FATAL


class TestSummarize:
    def test_golden(self, fixtures_dir, capsys):
        assert main(["summarize", str(fixtures_dir / "golden_annotations.json")]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[1].split() == ["test", "3"]
        assert lines[-1].split() == ["total", "3", "1", "4"]

    def test_written_corpus(self, tmp_path, capsys):
        corpus = generate_corpus(10, seed=1)
        path = tmp_path / "a.json"
        write_annotations(corpus.annotations, path)
        assert main(["summarize", str(path)]) == EXIT_OK
        assert "total" in capsys.readouterr().out


def test_no_command():
    assert main([]) == EXIT_USAGE
