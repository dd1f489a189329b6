"""End-to-end chaining of the recommendation stages.

A :class:`Corpus` bundles the three inputs every run needs; it can come
from the synthetic generator or from parsed real files.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from scenerec import cooccurrence, curation, recommend
from scenerec.cooccurrence import CooccurrenceMatrix
from scenerec.curation import AugmentationPlan
from scenerec.errors import PipelineError
from scenerec.ingestion import ScenePoolEntry, ScenePrediction
from scenerec.model import DatasetManifest, write_manifest
from scenerec.recommend import CandidateSet


@dataclass
class Corpus:
    predictions: list[ScenePrediction]
    manifest: DatasetManifest
    pool: list[ScenePoolEntry]
    scene_names: tuple[str, ...]
    expected_pairs: tuple[tuple[str, str], ...] = ()  # (scene, object) planted by synth


@dataclass
class PipelineResult:
    matrix: CooccurrenceMatrix
    candidates: CandidateSet
    plan: AugmentationPlan
    augmented: DatasetManifest


def run_pipeline(
    corpus: Corpus,
    *,
    top_k: int,
    threshold: float,
    top_n: int,
    min_clean_size: int,
    cap: int,
    seed: int,
    threads: int = 1,
    out_dir=None,
) -> PipelineResult:
    """count -> score -> select -> collect/clean/finalize -> emit.

    When ``out_dir`` is given every intermediate artifact is written
    there for audit. Stage failures re-raise as :class:`PipelineError`
    tagged with the stage name.
    """

    def stage(name, fn):
        try:
            return fn()
        except PipelineError:
            raise
        except Exception as exc:
            raise PipelineError(name, exc) from exc

    matrix = stage("cooccurrence", lambda: cooccurrence.build_cooccurrence(
        corpus.predictions, corpus.manifest, top_k,
        scene_names=corpus.scene_names, threads=threads,
    ))
    entries = stage("score", lambda: recommend.score_scenes(matrix, threshold))
    candidates = stage("select", lambda: recommend.select_candidates(entries, top_n, threshold))
    plan = stage("curation", lambda: curation.build_plan(
        corpus.pool, candidates,
        target_object_names=corpus.manifest.space.foreground_names,
        min_clean_size=min_clean_size, cap=cap, seed=seed,
    ))
    augmented = stage("augment", lambda: curation.emit_augmented_manifest(corpus.manifest, plan))

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        stage("persist", lambda: _persist(out_dir, matrix, candidates, plan, augmented))
    return PipelineResult(matrix, candidates, plan, augmented)


def _persist(out_dir: Path, matrix, candidates, plan, augmented) -> None:
    cooccurrence.write_cooccurrence_csv(matrix, out_dir / "cooccurrence.csv")
    recommend.write_candidates_csv(candidates, out_dir / "candidates.csv")
    (out_dir / "candidates.txt").write_text(
        recommend.summarize_candidates(candidates), encoding="utf-8"
    )
    curation.write_plan_json(plan, out_dir / "plan.json")
    (out_dir / "plan.txt").write_text(curation.format_plan_report(plan), encoding="utf-8")
    write_manifest(augmented, out_dir / "augmented_manifest.tsv")
