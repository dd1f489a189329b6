import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from scenerec import model
from scenerec.evaluation import (
    ConfusionMatrix,
    accumulate_confusion,
    compute_deltas,
    compute_iou,
    empty_confusion,
    evaluate_mask_dirs,
    format_iou_report,
    format_table_check,
    merge_confusion,
    normalize_confusion,
    read_confusion_csv,
    verify_published_means,
    write_confusion_csv,
    write_iou_csv,
    write_normalized_csv,
)
from scenerec.ingestion import PublishedRow, PublishedTable, SegMask, write_indexed_mask


def mask(rows):
    values = np.asarray(rows, dtype=np.uint8)
    return SegMask(values.shape[1], values.shape[0], values)


def confusion(counts, names=None):
    counts = np.asarray(counts, dtype=np.int64)
    if names is None:
        names = tuple(f"c{i}" for i in range(counts.shape[0]))
    return ConfusionMatrix(counts, tuple(names))


class TestAccumulate:
    def test_hand_checked_two_by_two(self):
        gt = mask([[0, 0], [1, 1]])
        pred = mask([[0, 1], [1, 1]])
        acc = accumulate_confusion(pred, gt, empty_confusion(("bg", "fg")))
        assert acc.counts.tolist() == [[1, 1], [0, 2]]
        assert acc.total_pixels == 4

    def test_accumulates_over_pairs(self):
        gt = mask([[0, 1]])
        pred = mask([[0, 1]])
        acc = empty_confusion(("bg", "fg"))
        for _ in range(3):
            acc = accumulate_confusion(pred, gt, acc)
        assert acc.counts.tolist() == [[3, 0], [0, 3]]

    def test_ignored_gt_pixels_not_counted(self):
        gt = mask([[255, 255, 0]])
        pred = mask([[0, 1, 0]])
        acc = accumulate_confusion(pred, gt, empty_confusion(("bg", "fg")))
        assert acc.total_pixels == 1

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mask dimensions differ"):
            accumulate_confusion(mask([[0]]), mask([[0, 0]]), empty_confusion(("bg",)))

    def test_does_not_mutate_accumulator(self):
        base = empty_confusion(("bg", "fg"))
        accumulate_confusion(mask([[1]]), mask([[1]]), base)
        assert base.counts.sum() == 0


class TestMerge:
    def test_adds(self):
        merged = merge_confusion(confusion([[1, 0], [0, 1]]), confusion([[0, 2], [0, 0]]))
        assert merged.counts.tolist() == [[1, 2], [0, 1]]

    def test_class_mismatch(self):
        with pytest.raises(ValueError, match="different class lists"):
            merge_confusion(confusion([[1]]), confusion([[1]], names=("other",)))


class TestNormalize:
    def test_defined_rows_sum_to_one(self):
        normalized = normalize_confusion(confusion([[2, 2], [0, 6]]))
        assert normalized.defined.tolist() == [True, True]
        assert np.allclose(normalized.values.sum(axis=1), 1.0)
        assert normalized.values[0].tolist() == [0.5, 0.5]

    def test_empty_row_is_undefined_not_nan_soup(self):
        normalized = normalize_confusion(confusion([[0, 0], [1, 1]]))
        assert normalized.defined.tolist() == [False, True]
        assert np.isnan(normalized.values[0]).all()
        assert not np.isnan(normalized.values[1]).any()

    @settings(max_examples=100, deadline=None)
    @given(
        st.integers(1, 8).flatmap(
            lambda n: hnp.arrays(np.int64, (n, n), elements=st.integers(0, 1000))
        )
    )
    def test_row_stochastic_property(self, counts):
        normalized = normalize_confusion(confusion(counts))
        sums = np.nansum(normalized.values, axis=1)
        for i, defined in enumerate(normalized.defined):
            if defined:
                assert abs(sums[i] - 1.0) < 1e-9
            else:
                assert np.isnan(normalized.values[i]).all()


class TestIoU:
    def test_hand_checked_values(self):
        report = compute_iou(confusion([[1, 1], [0, 2]]))
        assert report.per_class[0] == 0.5
        assert report.per_class[1] == 2 / 3
        assert report.mean_iou == pytest.approx(7 / 12, abs=1e-12)

    def test_identity_is_perfect(self):
        report = compute_iou(confusion(np.diag([5, 3, 2])))
        assert report.per_class.tolist() == [1.0, 1.0, 1.0]
        assert report.mean_iou == 1.0

    def test_absent_class_excluded_from_mean(self):
        report = compute_iou(confusion([[4, 0, 0], [0, 4, 0], [0, 0, 0]]))
        assert report.defined.tolist() == [True, True, False]
        assert np.isnan(report.per_class[2])
        assert report.mean_iou == 1.0

    def test_iou_of_by_name(self):
        report = compute_iou(confusion([[1, 1], [0, 2]], names=("bg", "fg")))
        assert report.iou_of("fg") == 2 / 3

    def test_disjoint_prediction_is_zero(self):
        report = compute_iou(confusion([[0, 3], [3, 0]]))
        assert report.per_class.tolist() == [0.0, 0.0]


class TestVerifyMeans:
    def _table(self, values, published):
        row = PublishedRow("m", tuple(values), published)
        names = tuple(f"c{i}" for i in range(len(values)))
        return PublishedTable(names, (row,))

    def test_within_tolerance_passes(self):
        check = verify_published_means(self._table([50.0, 51.0], 50.5), 0.05)
        assert check.all_passed
        assert check.rows[0].recomputed_mean == 50.5
        assert check.rows[0].difference == 0.0

    def test_boundary_is_inclusive(self):
        check = verify_published_means(self._table([50.0, 50.1], 50.0), 0.05)
        assert check.rows[0].passed

    def test_outside_tolerance_fails(self):
        check = verify_published_means(self._table([50.0, 50.2], 50.0), 0.05)
        assert not check.all_passed
        assert check.rows[0].difference == pytest.approx(0.1)

    def test_format_marks_failures(self):
        check = verify_published_means(self._table([50.0, 50.2], 50.0), 0.05)
        text = format_table_check(check)
        assert "FAIL" in text
        assert "0/1 rows pass" in text


class TestDeltas:
    def test_per_class_differences(self):
        ours = PublishedRow("ours", (50.0, 60.0, 10.0), 40.0)
        base = PublishedRow("base", (45.0, 30.0, 12.0), 29.0)
        report = compute_deltas(ours, base, ("a", "b", "c"))
        assert report.deltas == (5.0, 30.0, -2.0)
        assert report.max_delta_class == "b"
        assert report.max_delta == 30.0

    def test_layout_mismatch(self):
        ours = PublishedRow("ours", (1.0,), 1.0)
        base = PublishedRow("base", (1.0, 2.0), 1.5)
        with pytest.raises(ValueError, match="different class layouts"):
            compute_deltas(ours, base, ("a",))


class TestMaskDirs:
    def _write_pairs(self, tmp_path, masks, space):
        gt_dir = tmp_path / "gt"
        pred_dir = tmp_path / "pred"
        gt_dir.mkdir()
        pred_dir.mkdir()
        for name, (gt, pred) in masks.items():
            write_indexed_mask(gt, gt_dir / f"{name}.png")
            write_indexed_mask(pred, pred_dir / f"{name}.png")
        return pred_dir, gt_dir

    def test_matches_manual_accumulation(self, tmp_path):
        space = model.build_label_space(("background", "boat"))
        pairs = {
            "a": (mask([[0, 1], [1, 255]]), mask([[0, 1], [0, 0]])),
            "b": (mask([[1, 1]]), mask([[1, 0]])),
        }
        pred_dir, gt_dir = self._write_pairs(tmp_path, pairs, space)
        result = evaluate_mask_dirs(pred_dir, gt_dir, space)
        manual = empty_confusion(space.all_names)
        for gt, pred in pairs.values():
            manual = accumulate_confusion(pred, gt, manual)
        assert np.array_equal(result.counts, manual.counts)

    def test_threads_bit_identical(self, tmp_path):
        space = model.build_label_space(("background", "boat"))
        rng = np.random.default_rng(4)
        pairs = {}
        for i in range(9):
            values = rng.integers(0, 2, size=(6, 5), dtype=np.uint8)
            pairs[f"m{i}"] = (mask(values), mask((values + i) % 2))
        pred_dir, gt_dir = self._write_pairs(tmp_path, pairs, space)
        one = evaluate_mask_dirs(pred_dir, gt_dir, space, threads=1)
        four = evaluate_mask_dirs(pred_dir, gt_dir, space, threads=4)
        assert np.array_equal(one.counts, four.counts)

    def test_missing_prediction_file(self, tmp_path):
        space = model.build_label_space(("background", "boat"))
        pred_dir, gt_dir = self._write_pairs(tmp_path, {"a": (mask([[0]]), mask([[0]]))}, space)
        (pred_dir / "a.png").unlink()
        with pytest.raises(FileNotFoundError, match="prediction mask.*a.png"):
            evaluate_mask_dirs(pred_dir, gt_dir, space)

    def test_empty_gt_dir(self, tmp_path):
        (tmp_path / "gt").mkdir()
        (tmp_path / "pred").mkdir()
        space = model.build_label_space(("background", "boat"))
        with pytest.raises(FileNotFoundError, match="no .png masks"):
            evaluate_mask_dirs(tmp_path / "pred", tmp_path / "gt", space)

    def test_bad_mask_error_names_the_file(self, tmp_path):
        space = model.build_label_space(("background", "boat"))
        pairs = {"a": (mask([[0]]), mask([[0]])), "bad": (mask([[1]]), mask([[255]]))}
        pred_dir, gt_dir = self._write_pairs(tmp_path, pairs, space)
        with pytest.raises(ValueError, match="bad.png.*must be complete"):
            evaluate_mask_dirs(pred_dir, gt_dir, space)


class TestCsv:
    def test_confusion_round_trip(self, tmp_path):
        original = confusion([[5, 1], [0, 9]], names=("bg", "fg"))
        path = tmp_path / "c.csv"
        write_confusion_csv(original, path)
        back = read_confusion_csv(path)
        assert np.array_equal(back.counts, original.counts)
        assert back.class_names == original.class_names

    def test_read_rejects_missing_header(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text("bg,fg\n1,2\n")
        with pytest.raises(ValueError, match="missing 'class' header"):
            read_confusion_csv(path)

    def test_normalized_csv_leaves_undefined_rows_empty(self, tmp_path):
        normalized = normalize_confusion(confusion([[0, 0], [2, 2]], names=("bg", "fg")))
        path = tmp_path / "n.csv"
        write_normalized_csv(normalized, path)
        lines = path.read_text().splitlines()
        assert lines[1] == "bg,,"
        assert lines[2] == "fg,0.500000,0.500000"

    def test_iou_csv(self, tmp_path):
        report = compute_iou(confusion([[4, 0, 0], [0, 4, 0], [0, 0, 0]]))
        path = tmp_path / "iou.csv"
        write_iou_csv(report, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "c0,c1,c2,mean"
        assert lines[1] == "1.000000,1.000000,,1.000000"


def test_format_iou_report_marks_undefined():
    report = compute_iou(confusion([[4, 0], [0, 0]], names=("bg", "fg")))
    text = format_iou_report(report)
    assert "100.0" in text
    assert "-" in text
    assert "mean" in text
