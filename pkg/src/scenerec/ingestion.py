"""Parsers and writers for every external file the toolkit consumes.

Formats:
  - predictions.tsv: ``image_id<TAB>scene<TAB>score<TAB>scene<TAB>score...``
    (k pairs per line, scores non-increasing).
  - masks: 8-bit indexed PNG, palette index == class id, 255 == ignore.
  - published result tables: delimited text, header row with class names
    and a trailing ``mean`` column.
  - scene pool: ``image_id<TAB>scene_class<TAB>tag,tag`` (tags optional).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from PIL import Image

from scenerec import kernels
from scenerec.errors import ParseError
from scenerec.model import IGNORE_VALUE, LabelSpace


@dataclass(frozen=True)
class ScenePrediction:
    """Top-k scene-classifier output for one image, best first."""

    image_id: str
    entries: tuple[tuple[str, float], ...]

    def top_scenes(self, k: int) -> tuple[str, ...]:
        return tuple(name for name, _ in self.entries[:k])


@dataclass(frozen=True)
class SegMask:
    """Dense segmentation labels; 255 marks ignored pixels."""

    width: int
    height: int
    values: np.ndarray  # uint8, shape (height, width), read-only

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.uint8)
        if values.shape != (self.height, self.width):
            raise ValueError(
                f"mask values shape {values.shape} does not match {self.height}x{self.width}"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class PublishedRow:
    method: str
    values: tuple[float, ...]
    published_mean: float


@dataclass(frozen=True)
class PublishedTable:
    """Per-class result table as printed: 21 class columns plus a mean."""

    class_names: tuple[str, ...]
    rows: tuple[PublishedRow, ...]

    def row(self, method: str) -> PublishedRow:
        for row in self.rows:
            if row.method == method:
                return row
        raise KeyError(f"no row named {method!r}")


def parse_predictions(path, vocabulary: Sequence[str] | None = None) -> list[ScenePrediction]:
    """Parse predictions.tsv; one ScenePrediction per line.

    All lines must carry the same number of (scene, score) pairs. When a
    vocabulary is given, unknown scene names are rejected.
    """
    path = Path(path)
    vocab = set(vocabulary) if vocabulary is not None else None
    predictions: list[ScenePrediction] = []
    seen: set[str] = set()
    expected_k: int | None = None
    with path.open("r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) < 3 or len(fields) % 2 == 0:
                raise ParseError(
                    f"expected image_id plus (scene, score) pairs, got {len(fields)} fields",
                    path, lineno,
                )
            image_id = fields[0]
            if image_id in seen:
                raise ParseError(f"duplicate image_id {image_id!r}", path, lineno)
            seen.add(image_id)
            k = (len(fields) - 1) // 2
            if expected_k is None:
                expected_k = k
            elif k != expected_k:
                raise ParseError(f"line has {k} entries but earlier lines had {expected_k}", path, lineno)
            entries: list[tuple[str, float]] = []
            prev = None
            for j in range(k):
                name = fields[1 + 2 * j]
                raw_score = fields[2 + 2 * j]
                if vocab is not None and name not in vocab:
                    raise ParseError(f"unknown scene name {name!r}", path, lineno)
                try:
                    score = float(raw_score)
                except ValueError:
                    raise ParseError(f"bad score {raw_score!r}", path, lineno) from None
                if prev is not None and score > prev:
                    raise ParseError(f"scores not non-increasing at entry {j + 1}", path, lineno)
                prev = score
                entries.append((name, score))
            predictions.append(ScenePrediction(image_id, tuple(entries)))
    return predictions


def write_predictions(predictions: Iterable[ScenePrediction], path) -> None:
    lines = []
    for prediction in predictions:
        fields = [prediction.image_id]
        for name, score in prediction.entries:
            fields.append(name)
            fields.append(repr(score))
        lines.append("\t".join(fields))
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8", newline="\n")


def parse_indexed_mask(path, space: LabelSpace) -> SegMask:
    """Read an 8-bit indexed PNG whose palette indices are class ids."""
    path = Path(path)
    with Image.open(path) as img:
        if img.mode != "P":
            raise ParseError(f"not an indexed-color image (mode {img.mode!r})", path)
        values = np.asarray(img, dtype=np.uint8)
    bad = kernels.first_invalid_index(values, space.num_classes)
    if bad >= 0:
        value = int(values.reshape(-1)[bad])
        raise ParseError(
            f"invalid index {value} at pixel {bad} (valid: 0..{space.num_classes - 1} or {IGNORE_VALUE})",
            path,
        )
    return SegMask(width=values.shape[1], height=values.shape[0], values=values)


def voc_color_map(n: int = 256) -> np.ndarray:
    """The Pascal VOC palette: deterministic bit-shuffled colors per index."""
    cmap = np.zeros((n, 3), dtype=np.uint8)
    for i in range(n):
        r = g = b = 0
        c = i
        for j in range(8):
            r |= ((c >> 0) & 1) << (7 - j)
            g |= ((c >> 1) & 1) << (7 - j)
            b |= ((c >> 2) & 1) << (7 - j)
            c >>= 3
        cmap[i] = (r, g, b)
    cmap[IGNORE_VALUE] = (255, 255, 255)
    return cmap


def write_indexed_mask(mask: SegMask, path, palette: np.ndarray | None = None) -> None:
    """Write a mask as an indexed PNG; indices round-trip bit-exactly."""
    if palette is None:
        palette = voc_color_map()
    img = Image.fromarray(np.asarray(mask.values, dtype=np.uint8), mode="P")
    img.putpalette(palette.astype(np.uint8).reshape(-1).tolist())
    img.save(Path(path), format="PNG")


def parse_published_table(path) -> PublishedTable:
    """Parse a per-class result table (tab- or comma-separated).

    Layout: header ``method <21 class names> mean``; each row a method
    name, exactly 21 per-class values and the published mean.
    """
    path = Path(path)
    lines = [
        line for line in path.read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.startswith("#")
    ]
    if not lines:
        raise ParseError("empty table", path)
    delimiter = "\t" if "\t" in lines[0] else ","
    header = [cell.strip() for cell in lines[0].split(delimiter)]
    if len(header) < 3 or header[-1].lower() != "mean":
        raise ParseError("header must end with a 'mean' column", path, 1)
    class_names = tuple(header[1:-1])
    rows: list[PublishedRow] = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = [cell.strip() for cell in line.split(delimiter)]
        method = cells[0]
        if len(cells) != len(class_names) + 2:
            raise ParseError(
                f"row {method!r} has {len(cells) - 2} class values, expected {len(class_names)}",
                path, lineno,
            )
        try:
            numbers = [float(cell) for cell in cells[1:]]
        except ValueError:
            raise ParseError(f"row {method!r} has a non-numeric cell", path, lineno) from None
        rows.append(PublishedRow(method, tuple(numbers[:-1]), numbers[-1]))
    return PublishedTable(class_names, tuple(rows))


@dataclass(frozen=True)
class ScenePoolEntry:
    """One scene-dataset image: its scene class and any known object tags."""

    image_id: str
    scene_class: str
    object_tags: frozenset[str] = frozenset()


def parse_pool(path, vocabulary: Sequence[str] | None = None) -> list[ScenePoolEntry]:
    """Parse pool.tsv: ``image_id<TAB>scene_class<TAB>tag,tag``."""
    path = Path(path)
    vocab = set(vocabulary) if vocabulary is not None else None
    entries: list[ScenePoolEntry] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) < 2 or len(fields) > 3:
                raise ParseError(f"expected 2-3 tab-separated fields, got {len(fields)}", path, lineno)
            image_id, scene_class = fields[0], fields[1]
            if not image_id or not scene_class:
                raise ParseError("empty image_id or scene_class", path, lineno)
            if image_id in seen:
                raise ParseError(f"duplicate image_id {image_id!r}", path, lineno)
            seen.add(image_id)
            if vocab is not None and scene_class not in vocab:
                raise ParseError(f"unknown scene class {scene_class!r}", path, lineno)
            tags = frozenset(t for t in fields[2].split(",") if t) if len(fields) > 2 else frozenset()
            entries.append(ScenePoolEntry(image_id, scene_class, tags))
    return entries


def write_pool(entries: Iterable[ScenePoolEntry], path) -> None:
    lines = [
        "\t".join([e.image_id, e.scene_class, ",".join(sorted(e.object_tags))])
        for e in entries
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8", newline="\n")


def parse_class_names(path) -> list[str]:
    """Read a newline-delimited class list (background first)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [line.strip() for line in lines if line.strip() and not line.startswith("#")]
