"""Synthetic corpora with planted scene-object affinities.

The generator builds a corpus where chosen (object, scene) pairs are
recoverable by construction: a planted scene appears only in its own
object's top-k lists (never as filler elsewhere), so any occurrence at
all gives it exclusivity 1.0. Everything is a pure function of the
config, seed included.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from scenerec import ingestion
from scenerec.ingestion import ScenePoolEntry, ScenePrediction
from scenerec.model import (
    DatasetManifest,
    ImageRecord,
    Source,
    build_label_space,
    parse_manifest,
    write_manifest,
)
from scenerec.pipeline import Corpus


@dataclass(frozen=True)
class SynthConfig:
    """Corpus shape and planted structure.

    ``n_images`` counts images per object; ``pool_size`` counts pool
    images per planted scene. ``affinity`` maps an object name to its
    planted scene and the probability that scene shows up in the
    object's top-k.
    """

    n_objects: int
    n_scenes: int
    n_images: int
    k: int
    seed: int
    affinity: tuple[tuple[str, str, float], ...] = ()  # (object, scene, strength)
    pool_size: int = 0
    pool_contamination: float = 0.0
    object_names: tuple[str, ...] | None = None
    scene_names: tuple[str, ...] | None = None

    def resolved_object_names(self) -> tuple[str, ...]:
        if self.object_names is not None:
            return self.object_names
        return tuple(f"object{i:02d}" for i in range(self.n_objects))

    def resolved_scene_names(self) -> tuple[str, ...]:
        if self.scene_names is not None:
            return self.scene_names
        return tuple(f"scene{i:02d}" for i in range(self.n_scenes))


def _validate(config: SynthConfig, object_names, scene_names) -> dict[str, tuple[str, float]]:
    if config.n_objects < 1 or config.n_scenes < 1 or config.n_images < 1:
        raise ValueError("n_objects, n_scenes and n_images must all be >= 1")
    if len(object_names) != config.n_objects or len(scene_names) != config.n_scenes:
        raise ValueError("explicit name lists must match n_objects / n_scenes")
    if config.k < 1 or config.k > config.n_scenes:
        raise ValueError(f"k={config.k} must be in 1..n_scenes={config.n_scenes}")
    if not 0.0 <= config.pool_contamination <= 1.0:
        raise ValueError("pool_contamination must be in [0, 1]")
    planted: dict[str, tuple[str, float]] = {}
    for object_name, scene, strength in config.affinity:
        if object_name not in object_names:
            raise ValueError(f"affinity object {object_name!r} is not an object name")
        if scene not in scene_names:
            raise ValueError(f"affinity scene {scene!r} is not a scene name")
        if not 0.0 <= strength <= 1.0:
            raise ValueError(f"affinity strength {strength} must be in [0, 1]")
        if object_name in planted:
            raise ValueError(f"object {object_name!r} has more than one planted scene")
        planted[object_name] = (scene, strength)
    planted_scenes = {scene for scene, strength in planted.values() if strength > 0}
    if config.n_scenes - len(planted_scenes) < config.k:
        raise ValueError(
            f"k={config.k} filler scenes needed but only "
            f"{config.n_scenes - len(planted_scenes)} non-planted scenes exist"
        )
    return planted


def generate_corpus(config: SynthConfig) -> Corpus:
    """Build predictions, manifest and pool with the planted structure.

    Deterministic: one seeded stream, consumed in a fixed object-major
    order.
    """
    object_names = config.resolved_object_names()
    scene_names = config.resolved_scene_names()
    planted = _validate(config, object_names, scene_names)
    planted_scenes = {scene for scene, strength in planted.values() if strength > 0}
    fillers = [s for s in scene_names if s not in planted_scenes]
    rng = random.Random(config.seed)

    predictions: list[ScenePrediction] = []
    records: list[ImageRecord] = []
    space = build_label_space(("background",) + object_names)
    for obj_index, object_name in enumerate(object_names):
        plant = planted.get(object_name)
        label = frozenset({obj_index + 1})
        for img_index in range(config.n_images):
            image_id = f"{object_name}_{img_index:05d}"
            use_plant = plant is not None and plant[1] > 0 and rng.random() < plant[1]
            n_fill = config.k - 1 if use_plant else config.k
            scenes = ([plant[0]] if use_plant else []) + rng.sample(fillers, n_fill)
            scores = sorted((rng.random() for _ in range(config.k)), reverse=True)
            entries = tuple(zip(scenes, scores))
            predictions.append(ScenePrediction(image_id, entries))
            records.append(ImageRecord(image_id, label, None, Source.TARGET_DATASET))

    pool: list[ScenePoolEntry] = []
    for object_name in object_names:
        plant = planted.get(object_name)
        if plant is None:
            continue
        scene = plant[0]
        for pool_index in range(config.pool_size):
            tags = frozenset()
            if rng.random() < config.pool_contamination:
                tags = frozenset({object_name})
            pool.append(ScenePoolEntry(f"pool_{scene}_{pool_index:05d}", scene, tags))

    expected = tuple(
        (planted[obj][0], obj)
        for obj in object_names
        if obj in planted and planted[obj][1] > 0
    )
    manifest = DatasetManifest(
        space, tuple(records), provenance=f"synthetic corpus, seed={config.seed}"
    )
    return Corpus(predictions, manifest, pool, scene_names, expected)


def write_corpus(corpus: Corpus, out_dir) -> None:
    """Persist a corpus in exactly the formats the parsers consume."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ingestion.write_predictions(corpus.predictions, out_dir / "predictions.tsv")
    write_manifest(corpus.manifest, out_dir / "manifest.tsv")
    ingestion.write_pool(corpus.pool, out_dir / "pool.tsv")
    (out_dir / "scene_vocab.txt").write_text(
        "\n".join(corpus.scene_names) + "\n", encoding="utf-8"
    )
    if corpus.expected_pairs:
        lines = [f"{scene},{obj}" for scene, obj in corpus.expected_pairs]
        (out_dir / "expected_pairs.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_corpus(corpus_dir) -> Corpus:
    """Load a corpus directory written by :func:`write_corpus`."""
    corpus_dir = Path(corpus_dir)
    scene_names = tuple(ingestion.parse_class_names(corpus_dir / "scene_vocab.txt"))
    predictions = ingestion.parse_predictions(corpus_dir / "predictions.tsv", scene_names)
    manifest = parse_manifest(corpus_dir / "manifest.tsv")
    pool = ingestion.parse_pool(corpus_dir / "pool.tsv", scene_names)
    expected: tuple[tuple[str, str], ...] = ()
    expected_file = corpus_dir / "expected_pairs.csv"
    if expected_file.exists():
        expected = tuple(
            tuple(line.split(","))  # type: ignore[misc]
            for line in expected_file.read_text(encoding="utf-8").splitlines()
            if line
        )
    return Corpus(predictions, manifest, pool, scene_names, expected)
