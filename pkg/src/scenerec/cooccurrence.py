"""Scene-object co-occurrence counting.

``counts[i][j]`` is the number of images whose top-k predicted scenes
include scene i and whose image-level labels include foreground object j.
Counting is binary: an image contributes at most 1 to any cell, however
confident the scene classifier was.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from scenerec.errors import ParseError
from scenerec.ingestion import ScenePrediction
from scenerec.model import DatasetManifest


@dataclass(frozen=True)
class CooccurrenceMatrix:
    """Scene-by-object occurrence counts (rows: scenes, columns: objects)."""

    counts: np.ndarray  # int64, shape (len(scene_names), len(object_names))
    scene_names: tuple[str, ...]
    object_names: tuple[str, ...]
    k: int

    def __post_init__(self):
        counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        if counts.shape != (len(self.scene_names), len(self.object_names)):
            raise ValueError(
                f"counts shape {counts.shape} does not match "
                f"{len(self.scene_names)} scenes x {len(self.object_names)} objects"
            )
        if counts.size and counts.min() < 0:
            raise ValueError("counts must be nonnegative")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape


def build_cooccurrence(
    predictions: Sequence[ScenePrediction],
    manifest: DatasetManifest,
    k: int,
    scene_names: Sequence[str] | None = None,
    threads: int = 1,
) -> CooccurrenceMatrix:
    """Count top-k scene / image-label co-occurrences over a manifest.

    Rows cover the full scene vocabulary: pass ``scene_names`` explicitly
    (e.g. all 365 categories) to keep scenes that never show up in any
    top-k; otherwise the sorted set of observed names is used. Columns are
    the manifest's foreground classes. Every labeled record must have a
    prediction with at least k entries.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if threads < 1:
        raise ValueError("threads must be >= 1")
    by_id: dict[str, ScenePrediction] = {}
    for prediction in predictions:
        if prediction.image_id in by_id:
            raise ValueError(f"duplicate prediction for image {prediction.image_id!r}")
        by_id[prediction.image_id] = prediction

    labeled = [record for record in manifest.records if record.labels]
    missing = [record.image_id for record in labeled if record.image_id not in by_id]
    if missing:
        shown = ", ".join(missing[:10]) + (" ..." if len(missing) > 10 else "")
        raise ValueError(f"no scene prediction for {len(missing)} labeled image(s): {shown}")
    short = [r.image_id for r in labeled if len(by_id[r.image_id].entries) < k]
    if short:
        shown = ", ".join(short[:10]) + (" ..." if len(short) > 10 else "")
        raise ValueError(f"k={k} exceeds available entries for image(s): {shown}")

    if scene_names is None:
        observed = {name for p in predictions for name, _ in p.entries}
        scene_names = sorted(observed)
    scene_names = tuple(scene_names)
    scene_index = {name: i for i, name in enumerate(scene_names)}
    if len(scene_index) != len(scene_names):
        raise ValueError("scene_names contains duplicates")

    object_names = manifest.space.foreground_names
    if not object_names:
        raise ValueError("manifest label space has no foreground classes")
    num_objects = manifest.space.num_objects

    def count_chunk(records) -> np.ndarray:
        counts = np.zeros((len(scene_names), len(object_names)), dtype=np.int64)
        for record in records:
            prediction = by_id[record.image_id]
            rows = set()
            for name, _ in prediction.entries[:k]:
                row = scene_index.get(name)
                if row is None:
                    raise ValueError(
                        f"scene {name!r} (image {record.image_id!r}) is not in the scene vocabulary"
                    )
                rows.add(row)
            cols = []
            for label in record.labels:
                if not 1 <= label < num_objects:
                    raise ValueError(
                        f"image {record.image_id!r} carries label id {label}, "
                        "which is not a foreground object class"
                    )
                cols.append(label - 1)
            for row in rows:
                counts[row, cols] += 1
        return counts

    if threads == 1 or len(labeled) < 2:
        counts = count_chunk(labeled)
    else:
        chunks = [labeled[i::threads] for i in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(count_chunk, chunks))
        counts = np.sum(partials, axis=0, dtype=np.int64)
    return CooccurrenceMatrix(counts, scene_names, tuple(object_names), k)


def merge_cooccurrence(a: CooccurrenceMatrix, b: CooccurrenceMatrix) -> CooccurrenceMatrix:
    """Cell-wise sum of two matrices built over disjoint image sets."""
    if a.scene_names != b.scene_names or a.object_names != b.object_names:
        raise ValueError("matrices cover different scene/object vocabularies")
    if a.k != b.k:
        raise ValueError(f"matrices built with different k ({a.k} vs {b.k})")
    return CooccurrenceMatrix(a.counts + b.counts, a.scene_names, a.object_names, a.k)


def zero_like(matrix: CooccurrenceMatrix) -> CooccurrenceMatrix:
    return CooccurrenceMatrix(
        np.zeros_like(matrix.counts), matrix.scene_names, matrix.object_names, matrix.k
    )


def write_cooccurrence_csv(matrix: CooccurrenceMatrix, path) -> None:
    """CSV export: scene rows, object columns, exact integer cells."""
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        handle.write(f"# k={matrix.k}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["scene", *matrix.object_names])
        for i, scene in enumerate(matrix.scene_names):
            writer.writerow([scene, *(int(v) for v in matrix.counts[i])])


def read_cooccurrence_csv(path) -> CooccurrenceMatrix:
    path = Path(path)
    k: int | None = None
    rows: list[list[str]] = []
    with path.open("r", encoding="utf-8", newline="") as handle:
        for raw in handle:
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("k="):
                    try:
                        k = int(body[2:])
                    except ValueError:
                        raise ParseError(f"bad k annotation {body!r}", path) from None
                continue
            rows.append(next(csv.reader([line])))
    if k is None:
        raise ParseError("missing '# k=' annotation", path)
    if not rows:
        raise ParseError("missing header row", path)
    header = rows[0]
    if len(header) < 2 or header[0] != "scene":
        raise ParseError("header must be 'scene,<object names...>'", path)
    object_names = tuple(header[1:])
    scene_names: list[str] = []
    counts = np.zeros((len(rows) - 1, len(object_names)), dtype=np.int64)
    for i, row in enumerate(rows[1:]):
        if len(row) != len(object_names) + 1:
            raise ParseError(f"row {row[0]!r} has {len(row) - 1} cells, expected {len(object_names)}", path)
        scene_names.append(row[0])
        try:
            counts[i] = [int(cell) for cell in row[1:]]
        except ValueError:
            raise ParseError(f"non-integer cell in row {row[0]!r}", path) from None
    return CooccurrenceMatrix(counts, tuple(scene_names), object_names, k)
