import pytest
from hypothesis import given, settings, strategies as st

from detection import CharDetection, ContractViolation, SYMBOLS
from plates import ArrangementError, LineCategory, arrange, categorize, split_lines


def char(symbol, x, y, w=10, h=20, confidence=0.9):
    return CharDetection.of(symbol, x, y, x + w, y + h, confidence)


def at_heights(*ys):
    return [char("1", 10 * i, y) for i, y in enumerate(ys)]


class TestCategorize:
    def test_flat_row_is_single(self):
        assert categorize(at_heights(20, 20, 20), 240) is LineCategory.SingleLineLP

    def test_spread_above_threshold_is_double(self):
        assert categorize(at_heights(10, 90), 200) is LineCategory.DoubleLineLP

    def test_spread_just_below_threshold_is_single(self):
        assert categorize(at_heights(10, 69), 200) is LineCategory.SingleLineLP

    def test_spread_at_threshold_is_double(self):
        assert categorize(at_heights(10, 70), 200) is LineCategory.DoubleLineLP

    def test_empty(self):
        with pytest.raises(ArrangementError):
            categorize([], 200)

    def test_crop_width_must_be_positive(self):
        with pytest.raises(ContractViolation):
            categorize(at_heights(10), 0)

    @given(st.lists(st.floats(0, 500), min_size=1, max_size=8), st.floats(1, 500), st.floats(0.1, 10))
    def test_scale_consistent(self, ys, width, factor):
        scaled = [y * factor for y in ys]
        spread, scaled_spread = max(ys) - min(ys), max(scaled) - min(scaled)
        # skip scalings that land within rounding of the boundary
        if abs(spread - width * 0.3) < 1e-6 or abs(scaled_spread - width * factor * 0.3) < 1e-6:
            return
        assert categorize(at_heights(*ys), width) is categorize(at_heights(*scaled), width * factor)

    def test_labels(self):
        assert LineCategory.SingleLineLP.label == "single"
        assert LineCategory.from_label("double") is LineCategory.DoubleLineLP


class TestSplitLines:
    def test_two_rows(self):
        chars = at_heights(10, 110, 20, 120)
        first, second = split_lines(chars, 200)
        assert [c.bbox.y1 for c in first] == [10, 20]
        assert [c.bbox.y1 for c in second] == [110, 120]

    def test_everything_below_threshold_goes_to_second_line(self):
        first, second = split_lines(at_heights(60, 80), 200)
        assert first == []
        assert len(second) == 2

    def test_boundary_goes_to_second_line(self):
        first, second = split_lines(at_heights(10, 60), 200)
        assert [c.bbox.y1 for c in first] == [10]
        assert [c.bbox.y1 for c in second] == [60]


class TestArrange:
    def test_single_line_sorts_by_x(self):
        plate = arrange([char("B", 40, 10), char("S", 10, 10), char("1", 70, 10)], 200)
        assert plate.category is LineCategory.SingleLineLP
        assert plate.raw_string == "SB1"
        assert plate.line_break == 3

    def test_double_line_sorts_each_line(self):
        chars = [char("1", 5, 100), char("B", 40, 10), char("2", 30, 100), char("S", 10, 10)]
        plate = arrange(chars, 200)
        assert plate.category is LineCategory.DoubleLineLP
        assert plate.raw_string == "SB12"
        assert plate.line_break == 2

    def test_single_character(self):
        plate = arrange([char("A", 3, 3)], 100)
        assert plate.raw_string == "A"
        assert plate.category is LineCategory.SingleLineLP

    def test_empty(self):
        with pytest.raises(ArrangementError):
            arrange([], 100)

    def test_equal_x_breaks_on_y_then_confidence(self):
        chars = [char("B", 10, 12), char("A", 10, 10, confidence=0.5), char("C", 10, 10, confidence=0.8)]
        assert arrange(chars, 200).raw_string == "CAB"

    def test_ordered_chars_keep_every_detection(self):
        chars = [char("B", 40, 10, confidence=0.7), char("S", 10, 10, confidence=0.6)]
        plate = arrange(chars, 200)
        assert [symbol for symbol, _ in plate.ordered_chars] == ["S", "B"]
        assert plate.confidences == [0.6, 0.7]

    @settings(max_examples=200)
    @given(st.lists(st.tuples(st.sampled_from(SYMBOLS), st.floats(0, 300), st.floats(0, 150), st.floats(0, 1)),
                    min_size=1, max_size=8),
           st.floats(50, 300), st.randoms(use_true_random=False))
    def test_permutation_invariant(self, specs, width, rnd):
        chars = [char(symbol, x, y, confidence=c) for symbol, x, y, c in specs]
        shuffled = list(chars)
        rnd.shuffle(shuffled)
        assert arrange(shuffled, width).raw_string == arrange(chars, width).raw_string

    @given(st.lists(st.tuples(st.floats(0, 300), st.floats(0, 150)), min_size=1, max_size=8), st.floats(50, 300))
    def test_x_non_decreasing_within_each_line(self, specs, width):
        plate = arrange([char("1", x, y) for x, y in specs], width)
        chars = [c for _, c in plate.ordered_chars]
        for line in (chars[:plate.line_break], chars[plate.line_break:]):
            xs = [c.bbox.x1 for c in line]
            assert xs == sorted(xs)
