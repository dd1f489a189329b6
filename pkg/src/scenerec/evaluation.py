"""Pixel confusion matrices, per-class IoU and result-table checks.

Counting follows the Pascal VOC convention: ground-truth pixels valued
255 are excluded everywhere, predictions must be complete (no 255).
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from scenerec import kernels
from scenerec.ingestion import PublishedRow, PublishedTable, SegMask, parse_indexed_mask
from scenerec.model import LabelSpace


@dataclass(frozen=True)
class ConfusionMatrix:
    """Raw pixel counts; cell (i, j) is gt class i predicted as class j."""

    counts: np.ndarray  # int64, square
    class_names: tuple[str, ...]

    def __post_init__(self):
        counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        n = len(self.class_names)
        if counts.shape != (n, n):
            raise ValueError(f"counts shape {counts.shape} does not match {n} classes")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    @property
    def total_pixels(self) -> int:
        return int(self.counts.sum())


def empty_confusion(class_names: Sequence[str]) -> ConfusionMatrix:
    n = len(class_names)
    return ConfusionMatrix(np.zeros((n, n), dtype=np.int64), tuple(class_names))


def accumulate_confusion(pred: SegMask, gt: SegMask, acc: ConfusionMatrix) -> ConfusionMatrix:
    """Add one (pred, gt) mask pair's pixel counts to the accumulator."""
    if (pred.width, pred.height) != (gt.width, gt.height):
        raise ValueError(
            f"mask dimensions differ: pred {pred.width}x{pred.height} vs gt {gt.width}x{gt.height}"
        )
    delta = kernels.confusion_counts(gt.values, pred.values, len(acc.class_names))
    return ConfusionMatrix(acc.counts + delta, acc.class_names)


def merge_confusion(a: ConfusionMatrix, b: ConfusionMatrix) -> ConfusionMatrix:
    if a.class_names != b.class_names:
        raise ValueError("confusion matrices cover different class lists")
    return ConfusionMatrix(a.counts + b.counts, a.class_names)


@dataclass(frozen=True)
class NormalizedConfusion:
    """Row-normalized confusion: each defined row sums to 1.

    Rows with no ground-truth pixels are undefined; their cells hold NaN
    and the row is flagged in ``defined`` so reports can render them
    distinctly instead of propagating NaN.
    """

    values: np.ndarray  # float64; NaN on undefined rows
    defined: np.ndarray  # bool per row
    class_names: tuple[str, ...]


def normalize_confusion(confusion: ConfusionMatrix) -> NormalizedConfusion:
    counts = confusion.counts
    row_sums = counts.sum(axis=1)
    defined = row_sums > 0
    values = np.full(counts.shape, np.nan, dtype=np.float64)
    if defined.any():
        values[defined] = counts[defined] / row_sums[defined, None]
    return NormalizedConfusion(values, defined, confusion.class_names)


@dataclass(frozen=True)
class IoUReport:
    """Per-class intersection-over-union plus the mean over defined classes."""

    class_names: tuple[str, ...]
    per_class: np.ndarray  # float64; NaN where undefined
    defined: np.ndarray  # bool per class
    mean_iou: float

    def iou_of(self, class_name: str) -> float:
        return float(self.per_class[self.class_names.index(class_name)])


def compute_iou(confusion: ConfusionMatrix) -> IoUReport:
    """Standard VOC IoU: diagonal over (row mass + column mass - diagonal).

    Classes absent from both masks (zero denominator) are undefined and
    excluded from the mean.
    """
    counts = confusion.counts
    diag = np.diag(counts).astype(np.float64)
    denom = (counts.sum(axis=1) + counts.sum(axis=0)).astype(np.float64) - diag
    defined = denom > 0
    per_class = np.full(len(diag), np.nan, dtype=np.float64)
    per_class[defined] = diag[defined] / denom[defined]
    mean = float(per_class[defined].mean()) if defined.any() else float("nan")
    return IoUReport(confusion.class_names, per_class, defined, mean)


@dataclass(frozen=True)
class RowCheck:
    method: str
    recomputed_mean: float
    published_mean: float
    difference: float
    passed: bool


@dataclass(frozen=True)
class TableCheck:
    tolerance: float
    rows: tuple[RowCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(row.passed for row in self.rows)


def verify_published_means(table: PublishedTable, tolerance: float) -> TableCheck:
    """Recompute each row's mean from its per-class cells and compare."""
    checks = []
    for row in table.rows:
        recomputed = sum(row.values) / len(row.values)
        difference = recomputed - row.published_mean
        checks.append(
            RowCheck(
                method=row.method,
                recomputed_mean=recomputed,
                published_mean=row.published_mean,
                difference=difference,
                passed=abs(difference) <= tolerance,
            )
        )
    return TableCheck(tolerance, tuple(checks))


def format_table_check(check: TableCheck) -> str:
    lines = [f"tolerance +/-{check.tolerance:g}"]
    for row in check.rows:
        status = "pass" if row.passed else "FAIL"
        lines.append(
            f"  {row.method:<16s} recomputed={row.recomputed_mean:8.4f} "
            f"published={row.published_mean:5.1f} diff={row.difference:+.4f}  {status}"
        )
    passed = sum(r.passed for r in check.rows)
    lines.append(f"{passed}/{len(check.rows)} rows pass")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class DeltaReport:
    class_names: tuple[str, ...]
    deltas: tuple[float, ...]
    max_delta: float
    max_delta_class: str


def compute_deltas(ours: PublishedRow, baseline: PublishedRow,
                   class_names: Sequence[str]) -> DeltaReport:
    """Per-class difference (ours - baseline) with the biggest gain flagged."""
    if len(ours.values) != len(baseline.values) or len(ours.values) != len(class_names):
        raise ValueError("rows cover different class layouts")
    deltas = tuple(o - b for o, b in zip(ours.values, baseline.values))
    best = max(range(len(deltas)), key=lambda i: deltas[i])
    return DeltaReport(
        class_names=tuple(class_names),
        deltas=deltas,
        max_delta=deltas[best],
        max_delta_class=class_names[best],
    )


def format_deltas(report: DeltaReport) -> str:
    lines = ["per-class delta (ours - baseline):"]
    for name, delta in zip(report.class_names, report.deltas):
        lines.append(f"  {name:<10s} {delta:+6.1f}")
    lines.append(f"largest gain: {report.max_delta_class} ({report.max_delta:+.1f})")
    return "\n".join(lines) + "\n"


def evaluate_mask_dirs(
    pred_dir, gt_dir, space: LabelSpace, threads: int = 1
) -> ConfusionMatrix:
    """Accumulate confusion over paired mask directories.

    Every ``*.png`` in gt_dir must have a same-named file in pred_dir.
    The file list is partitioned across worker threads; partial counts
    are merged in a fixed order, so the result is bit-identical for any
    thread count.
    """
    if threads < 1:
        raise ValueError("threads must be >= 1")
    pred_dir = Path(pred_dir)
    gt_dir = Path(gt_dir)
    gt_files = sorted(gt_dir.glob("*.png"))
    if not gt_files:
        raise FileNotFoundError(f"no .png masks in {gt_dir}")
    missing = [p.name for p in gt_files if not (pred_dir / p.name).exists()]
    if missing:
        shown = ", ".join(missing[:10]) + (" ..." if len(missing) > 10 else "")
        raise FileNotFoundError(f"{len(missing)} prediction mask(s) missing from {pred_dir}: {shown}")

    class_names = space.all_names

    def accumulate_chunk(files) -> ConfusionMatrix:
        acc = empty_confusion(class_names)
        for gt_file in files:
            gt = parse_indexed_mask(gt_file, space)
            pred = parse_indexed_mask(pred_dir / gt_file.name, space)
            try:
                acc = accumulate_confusion(pred, gt, acc)
            except ValueError as exc:
                raise ValueError(f"{gt_file.name}: {exc}") from None
        return acc

    if threads == 1 or len(gt_files) < 2:
        return accumulate_chunk(gt_files)
    chunks = [gt_files[i::threads] for i in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        partials = list(pool.map(accumulate_chunk, chunks))
    total = partials[0]
    for partial in partials[1:]:
        total = merge_confusion(total, partial)
    return total


def write_confusion_csv(confusion: ConfusionMatrix, path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["class", *confusion.class_names])
        for i, name in enumerate(confusion.class_names):
            writer.writerow([name, *(int(v) for v in confusion.counts[i])])


def read_confusion_csv(path) -> ConfusionMatrix:
    with Path(path).open("r", encoding="utf-8", newline="") as handle:
        rows = [row for row in csv.reader(handle) if row]
    if not rows or rows[0][:1] != ["class"]:
        raise ValueError(f"{path}: missing 'class' header row")
    class_names = tuple(rows[0][1:])
    counts = np.zeros((len(class_names), len(class_names)), dtype=np.int64)
    if len(rows) - 1 != len(class_names):
        raise ValueError(f"{path}: expected {len(class_names)} rows, got {len(rows) - 1}")
    for i, row in enumerate(rows[1:]):
        counts[i] = [int(cell) for cell in row[1:]]
    return ConfusionMatrix(counts, class_names)


def write_normalized_csv(normalized: NormalizedConfusion, path) -> None:
    """Normalized confusion as CSV; undefined rows have empty cells."""
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["class", *normalized.class_names])
        for i, name in enumerate(normalized.class_names):
            if normalized.defined[i]:
                writer.writerow([name, *(f"{v:.6f}" for v in normalized.values[i])])
            else:
                writer.writerow([name, *[""] * len(normalized.class_names)])


def format_iou_report(report: IoUReport) -> str:
    """Aligned per-class table in published-table column order."""
    width = max(6, max(len(n) for n in report.class_names))
    header = "  ".join(f"{n:>{width}s}" for n in report.class_names) + f"  {'mean':>{width}s}"
    cells = []
    for value, ok in zip(report.per_class, report.defined):
        cells.append(f"{100 * value:>{width}.1f}" if ok else f"{'-':>{width}s}")
    cells.append(f"{100 * report.mean_iou:>{width}.1f}")
    return header + "\n" + "  ".join(cells) + "\n"


def write_iou_csv(report: IoUReport, path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([*report.class_names, "mean"])
        row = [
            f"{v:.6f}" if ok else ""
            for v, ok in zip(report.per_class, report.defined)
        ]
        row.append(f"{report.mean_iou:.6f}")
        writer.writerow(row)
