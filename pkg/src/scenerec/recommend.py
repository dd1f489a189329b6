"""Scene scoring and candidate selection.

A cell (scene i, object j) of the co-occurrence matrix is admitted when
the scene is nearly exclusive to that object: its row fraction
``m_ij / sum_z m_iz`` must exceed the threshold T. Admitted cells are
ranked by score, the column fraction ``m_ij / sum_k m_kj`` (how much of
the object's scene mass this one scene holds), and the global top n
become the candidates.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from scenerec.cooccurrence import CooccurrenceMatrix
from scenerec.errors import ParseError

# Size cap for the brute-force route; beyond this the naive loops are
# no longer an interesting cross-check.
_BRUTE_FORCE_MAX_SCENES = 32
_BRUTE_FORCE_MAX_OBJECTS = 16


@dataclass(frozen=True)
class SceneScoreEntry:
    scene_id: int
    object_id: int
    scene_name: str
    object_name: str
    score: float        # column fraction, in (0, 1]
    exclusivity: float  # row fraction, in (T, 1]


@dataclass(frozen=True)
class CandidateSet:
    """Top-n admitted (scene, object) pairs, best score first.

    Ties break on (scene_id, object_id) ascending so selection is
    reproducible.
    """

    entries: tuple[SceneScoreEntry, ...]
    n: int
    threshold: float

    def by_object(self) -> dict[str, list[SceneScoreEntry]]:
        """Candidate scenes grouped per target object, rank order kept."""
        groups: dict[str, list[SceneScoreEntry]] = {}
        for entry in self.entries:
            groups.setdefault(entry.object_name, []).append(entry)
        return groups

    def scenes_for(self, object_name: str) -> list[str]:
        return [e.scene_name for e in self.entries if e.object_name == object_name]


def score_scenes(matrix: CooccurrenceMatrix, threshold: float) -> list[SceneScoreEntry]:
    """All (scene, object) cells passing the exclusivity threshold.

    Cells with a zero count, row sum or column sum are excluded: a pair
    that never occurs carries no evidence. Entries come back in
    (scene_id, object_id) order; ranking happens in select_candidates.
    """
    if not 0.0 <= threshold < 1.0:
        raise ValueError(f"threshold must be in [0, 1), got {threshold}")
    counts = matrix.counts
    row_sums = counts.sum(axis=1)
    col_sums = counts.sum(axis=0)
    entries: list[SceneScoreEntry] = []
    for i, j in np.argwhere(counts > 0):
        exclusivity = float(counts[i, j]) / float(row_sums[i])
        if exclusivity > threshold:
            score = float(counts[i, j]) / float(col_sums[j])
            entries.append(
                SceneScoreEntry(
                    scene_id=int(i),
                    object_id=int(j),
                    scene_name=matrix.scene_names[i],
                    object_name=matrix.object_names[j],
                    score=score,
                    exclusivity=exclusivity,
                )
            )
    return entries


def select_candidates(entries: Sequence[SceneScoreEntry], n: int, threshold: float) -> CandidateSet:
    """Keep the globally best n entries by (score desc, scene_id, object_id)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    ranked = sorted(entries, key=lambda e: (-e.score, e.scene_id, e.object_id))
    return CandidateSet(tuple(ranked[:n]), n=n, threshold=threshold)


def brute_force_candidates(matrix: CooccurrenceMatrix, threshold: float, n: int) -> CandidateSet:
    """Independent naive route for cross-checking score_scenes + select_candidates.

    Plain Python loops over every cell; shares only the data types with
    the main path. Restricted to small matrices.
    """
    n_scenes = len(matrix.scene_names)
    n_objects = len(matrix.object_names)
    if n_scenes > _BRUTE_FORCE_MAX_SCENES or n_objects > _BRUTE_FORCE_MAX_OBJECTS:
        raise ValueError(
            f"matrix {n_scenes}x{n_objects} exceeds the brute-force bound "
            f"{_BRUTE_FORCE_MAX_SCENES}x{_BRUTE_FORCE_MAX_OBJECTS}"
        )
    if not 0.0 <= threshold < 1.0:
        raise ValueError(f"threshold must be in [0, 1), got {threshold}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    cells = [[int(matrix.counts[i, j]) for j in range(n_objects)] for i in range(n_scenes)]
    row_totals = [0] * n_scenes
    col_totals = [0] * n_objects
    for i in range(n_scenes):
        for j in range(n_objects):
            row_totals[i] += cells[i][j]
            col_totals[j] += cells[i][j]
    admitted: list[SceneScoreEntry] = []
    for i in range(n_scenes):
        for j in range(n_objects):
            if cells[i][j] == 0:
                continue
            if cells[i][j] / row_totals[i] > threshold:
                admitted.append(
                    SceneScoreEntry(
                        scene_id=i,
                        object_id=j,
                        scene_name=matrix.scene_names[i],
                        object_name=matrix.object_names[j],
                        score=cells[i][j] / col_totals[j],
                        exclusivity=cells[i][j] / row_totals[i],
                    )
                )
    best: list[SceneScoreEntry] = []
    remaining = list(admitted)
    while remaining and len(best) < n:
        top = remaining[0]
        for candidate in remaining[1:]:
            better = candidate.score > top.score or (
                candidate.score == top.score
                and (candidate.scene_id, candidate.object_id) < (top.scene_id, top.object_id)
            )
            if better:
                top = candidate
        best.append(top)
        remaining.remove(top)
    return CandidateSet(tuple(best), n=n, threshold=threshold)


def write_candidates_csv(candidates: CandidateSet, path) -> None:
    """CSV export: one ranked row per candidate pair."""
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        handle.write(f"# T={candidates.threshold!r} n={candidates.n}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["scene_name", "object_name", "score", "exclusivity", "rank"])
        for rank, entry in enumerate(candidates.entries, start=1):
            writer.writerow([entry.scene_name, entry.object_name, repr(entry.score),
                             repr(entry.exclusivity), rank])


def read_candidates_csv(path) -> CandidateSet:
    path = Path(path)
    threshold: float | None = None
    n: int | None = None
    rows: list[list[str]] = []
    with path.open("r", encoding="utf-8", newline="") as handle:
        for raw in handle:
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                for token in line[1:].strip().split():
                    if token.startswith("T="):
                        threshold = float(token[2:])
                    elif token.startswith("n="):
                        n = int(token[2:])
                continue
            rows.append(next(csv.reader([line])))
    if threshold is None or n is None:
        raise ParseError("missing '# T=... n=...' annotation", path)
    if not rows or rows[0][:2] != ["scene_name", "object_name"]:
        raise ParseError("missing candidate header row", path)
    entries: list[SceneScoreEntry] = []
    for row in rows[1:]:
        if len(row) != 5:
            raise ParseError(f"expected 5 cells per candidate row, got {len(row)}", path)
        entries.append(
            SceneScoreEntry(
                scene_id=-1,
                object_id=-1,
                scene_name=row[0],
                object_name=row[1],
                score=float(row[2]),
                exclusivity=float(row[3]),
            )
        )
    return CandidateSet(tuple(entries), n=n, threshold=threshold)


def summarize_candidates(candidates: CandidateSet) -> str:
    """Human-readable summary grouped by target object."""
    if not candidates.entries:
        return "No candidate scenes (nothing passed the exclusivity threshold).\n"
    lines = [
        f"{len(candidates.entries)} candidate scene(s), "
        f"T={candidates.threshold:g}, n={candidates.n}",
    ]
    for object_name, group in candidates.by_object().items():
        lines.append(f"  {object_name}:")
        for entry in group:
            lines.append(
                f"    {entry.scene_name}  score={entry.score:.4f}  exclusivity={entry.exclusivity:.4f}"
            )
    return "\n".join(lines) + "\n"
