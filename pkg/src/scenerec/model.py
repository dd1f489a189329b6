"""Label spaces, image records and dataset manifests.

A manifest is the unit of exchange between every stage of the toolkit: it
pins the class vocabulary (objects first, optional scene classes after)
and lists the image-level labels of every record.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from scenerec.errors import ParseError

BACKGROUND = "background"
IGNORE_VALUE = 255

# Pascal VOC 2012 vocabulary, background first.
VOC_CLASSES = (
    "background", "aeroplane", "bicycle", "bird", "boat", "bottle",
    "bus", "car", "cat", "chair", "cow", "diningtable", "dog",
    "horse", "motorbike", "person", "pottedplant", "sheep", "sofa",
    "train", "tvmonitor",
)

# Reserved by the manifest format (field, label and section separators).
_FORBIDDEN_NAME_CHARS = "\t\n,|"


class Source(str, enum.Enum):
    """Where a record came from."""

    TARGET_DATASET = "target_dataset"
    SCENE_POOL = "scene_pool"
    WEB = "web"


@dataclass(frozen=True)
class LabelSpace:
    """Class vocabulary with stable contiguous ids.

    Object classes (background at id 0) come first; scene classes, when
    present, occupy the ids after the last object class.
    """

    object_names: tuple[str, ...]
    scene_names: tuple[str, ...] = ()

    ignore_value = IGNORE_VALUE

    @property
    def all_names(self) -> tuple[str, ...]:
        return self.object_names + self.scene_names

    @property
    def num_objects(self) -> int:
        return len(self.object_names)

    @property
    def num_classes(self) -> int:
        return len(self.object_names) + len(self.scene_names)

    @property
    def foreground_names(self) -> tuple[str, ...]:
        """Object classes without the background."""
        return self.object_names[1:]

    def id_of(self, name: str) -> int:
        try:
            return self._index()[name]
        except KeyError:
            raise KeyError(f"unknown class name {name!r}") from None

    def name_of(self, class_id: int) -> str:
        names = self.all_names
        if not 0 <= class_id < len(names):
            raise KeyError(f"unknown class id {class_id}")
        return names[class_id]

    def is_scene_id(self, class_id: int) -> bool:
        return class_id >= self.num_objects

    def __contains__(self, name: str) -> bool:
        return name in self._index()

    def _index(self) -> dict[str, int]:
        cached = self.__dict__.get("_name_to_id")
        if cached is None:
            cached = {name: i for i, name in enumerate(self.all_names)}
            object.__setattr__(self, "_name_to_id", cached)
        return cached


def build_label_space(object_names: Sequence[str], scene_names: Sequence[str] = ()) -> LabelSpace:
    """Assign contiguous ids: objects in the given order, then scenes.

    ``object_names[0]`` must be "background". Names must be unique
    (case-sensitive) and free of tab/newline/comma/pipe, which the
    manifest format reserves.
    """
    if not object_names:
        raise ValueError("object_names must not be empty")
    if object_names[0] != BACKGROUND:
        raise ValueError(f"object_names[0] must be {BACKGROUND!r}, got {object_names[0]!r}")
    seen: set[str] = set()
    for name in list(object_names) + list(scene_names):
        if not name:
            raise ValueError("class names must be non-empty")
        if any(ch in name for ch in _FORBIDDEN_NAME_CHARS):
            raise ValueError(f"class name {name!r} contains a reserved character")
        if name in seen:
            raise ValueError(f"duplicate class name {name!r}")
        seen.add(name)
    return LabelSpace(tuple(object_names), tuple(scene_names))


@dataclass(frozen=True)
class ImageRecord:
    """One image with its image-level labels."""

    image_id: str
    labels: frozenset[int] = frozenset()
    mask_path: str | None = None
    source: Source | None = None


@dataclass
class DatasetManifest:
    space: LabelSpace
    records: tuple[ImageRecord, ...] = ()
    provenance: str = ""

    def __post_init__(self):
        self.records = tuple(self.records)


@dataclass(frozen=True)
class Violation:
    """One invariant broken by a manifest record (or the manifest itself)."""

    image_id: str
    rule: str
    detail: str

    def __str__(self) -> str:
        return f"{self.image_id}: [{self.rule}] {self.detail}"


def validate_manifest(manifest: DatasetManifest) -> list[Violation]:
    """Check every manifest invariant; an empty list means the manifest is clean.

    Violations are data, not exceptions: callers decide whether to stop.
    """
    violations: list[Violation] = []
    space = manifest.space
    seen_ids: set[str] = set()
    for record in manifest.records:
        if record.image_id in seen_ids:
            violations.append(Violation(record.image_id, "duplicate-id", "image_id occurs more than once"))
        seen_ids.add(record.image_id)
        for label in sorted(record.labels):
            if not 0 <= label < space.num_classes:
                violations.append(
                    Violation(record.image_id, "unknown-label", f"label id {label} is not in the label space")
                )
                continue
            if label == 0:
                violations.append(
                    Violation(record.image_id, "background-label", "background must not be an image-level label")
                )
            elif space.is_scene_id(label) and record.source is not Source.SCENE_POOL:
                violations.append(
                    Violation(
                        record.image_id,
                        "scene-label",
                        f"scene class {space.name_of(label)!r} on a non scene_pool record",
                    )
                )
    return violations


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\n", "\\n").replace("\t", "\\t")


def _unescape(text: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            out.append({"n": "\n", "t": "\t", "\\": "\\"}.get(nxt, nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def write_manifest(manifest: DatasetManifest, path) -> None:
    """Write the tab-separated manifest format.

    Header: ``# labels: obj0,obj1,...|scene0,scene1`` (names in id order,
    ``|`` splits the scene segment off; absent when there are none).
    Records: ``image_id<TAB>label,label<TAB>mask_path<TAB>source``.
    """
    space = manifest.space
    header = ",".join(space.object_names)
    if space.scene_names:
        header += "|" + ",".join(space.scene_names)
    lines = [f"# labels: {header}"]
    if manifest.provenance:
        lines.append(f"# provenance: {_escape(manifest.provenance)}")
    for record in manifest.records:
        labels = ",".join(space.name_of(i) for i in sorted(record.labels))
        source = record.source.value if record.source is not None else ""
        lines.append("\t".join([record.image_id, labels, record.mask_path or "", source]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def parse_manifest(path) -> DatasetManifest:
    """Parse the manifest format written by :func:`write_manifest`.

    Raises :class:`ParseError` (with a line number) for malformed lines,
    unknown label names, unknown sources or duplicate image ids.
    """
    path = Path(path)
    space: LabelSpace | None = None
    provenance = ""
    records: list[ImageRecord] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("labels:"):
                    space = _parse_label_header(body[len("labels:"):].strip(), path, lineno)
                elif body.startswith("provenance:"):
                    provenance = _unescape(body[len("provenance:"):].strip())
                continue
            if space is None:
                raise ParseError("record line before the '# labels:' header", path, lineno)
            fields = line.split("\t")
            if len(fields) < 2 or len(fields) > 4:
                raise ParseError(f"expected 2-4 tab-separated fields, got {len(fields)}", path, lineno)
            image_id = fields[0]
            if not image_id:
                raise ParseError("empty image_id", path, lineno)
            if image_id in seen:
                raise ParseError(f"duplicate image_id {image_id!r}", path, lineno)
            seen.add(image_id)
            labels: set[int] = set()
            if fields[1]:
                for name in fields[1].split(","):
                    if name not in space:
                        raise ParseError(f"unknown label name {name!r}", path, lineno)
                    labels.add(space.id_of(name))
            mask_path = fields[2] if len(fields) > 2 and fields[2] else None
            source: Source | None = None
            if len(fields) > 3 and fields[3]:
                try:
                    source = Source(fields[3])
                except ValueError:
                    raise ParseError(f"unknown source tag {fields[3]!r}", path, lineno) from None
            records.append(ImageRecord(image_id, frozenset(labels), mask_path, source))
    if space is None:
        raise ParseError("missing '# labels:' header", path)
    return DatasetManifest(space, tuple(records), provenance)


def _parse_label_header(body: str, path, lineno: int) -> LabelSpace:
    if "|" in body:
        object_part, scene_part = body.split("|", 1)
        scene_names = [n for n in scene_part.split(",") if n]
    else:
        object_part, scene_names = body, []
    object_names = [n for n in object_part.split(",") if n]
    try:
        return build_label_space(object_names, scene_names)
    except ValueError as exc:
        raise ParseError(f"bad label header: {exc}", path, lineno) from None


def records_by_id(records: Iterable[ImageRecord]) -> dict[str, ImageRecord]:
    return {record.image_id: record for record in records}
