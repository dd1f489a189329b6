"""Turning candidate scenes into an augmented dataset manifest.

For each target object the pool images of its candidate scenes are
gathered (Q), images containing ANY of the dataset's object classes are
removed (G), and a seeded uniform sample capped per class (S) is added to
the dataset as one new scene class, ``scene_for_<object>``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from scenerec.ingestion import ScenePoolEntry
from scenerec.model import (
    DatasetManifest,
    ImageRecord,
    Source,
    build_label_space,
)
from scenerec.recommend import CandidateSet

SCENE_CLASS_PREFIX = "scene_for_"


def scene_class_name(object_name: str) -> str:
    return SCENE_CLASS_PREFIX + object_name


@dataclass(frozen=True)
class TargetPlan:
    """Per-target bookkeeping; s_ids is a subset of g_ids, g_ids of q_ids."""

    object_name: str
    candidate_scenes: tuple[str, ...]
    q_ids: tuple[str, ...]
    g_ids: tuple[str, ...]
    accepted: bool
    s_ids: tuple[str, ...]


@dataclass
class AugmentationPlan:
    targets: tuple[TargetPlan, ...]
    min_clean_size: int
    cap: int
    seed: int
    warnings: tuple[str, ...] = ()
    provenance: str = ""

    def target(self, object_name: str) -> TargetPlan:
        for target in self.targets:
            if target.object_name == object_name:
                return target
        raise KeyError(f"no target named {object_name!r}")

    @property
    def accepted_targets(self) -> tuple[TargetPlan, ...]:
        return tuple(t for t in self.targets if t.accepted)

    @property
    def total_added(self) -> int:
        return sum(len(t.s_ids) for t in self.accepted_targets)


def collect_pool(
    pool: Sequence[ScenePoolEntry], candidates: CandidateSet
) -> tuple[dict[str, set[str]], list[str]]:
    """Gather Q per target object: all pool images of its candidate scenes.

    Returns (object_name -> image id set, warnings). A candidate scene
    with no pool images contributes nothing and produces a warning.
    """
    by_scene: dict[str, list[str]] = {}
    for entry in pool:
        by_scene.setdefault(entry.scene_class, []).append(entry.image_id)
    q_sets: dict[str, set[str]] = {}
    warnings: list[str] = []
    for object_name, group in candidates.by_object().items():
        ids: set[str] = set()
        for entry in group:
            members = by_scene.get(entry.scene_name)
            if members is None:
                warnings.append(
                    f"candidate scene {entry.scene_name!r} for target {object_name!r} "
                    "has no pool images"
                )
                continue
            ids.update(members)
        q_sets[object_name] = ids
    return q_sets, warnings


def clean_pool(
    q_ids: Iterable[str],
    pool: Sequence[ScenePoolEntry],
    target_object_names: Iterable[str],
) -> set[str]:
    """Drop every Q image tagged with ANY target object class, not just
    the one being augmented."""
    targets = set(target_object_names)
    tags_by_id = {entry.image_id: entry.object_tags for entry in pool}
    clean: set[str] = set()
    for image_id in q_ids:
        tags = tags_by_id.get(image_id, frozenset())
        if not tags & targets:
            clean.add(image_id)
    return clean


def finalize_plan(
    g_sets: Mapping[str, Iterable[str]],
    min_clean_size: int,
    cap: int,
    seed: int,
    q_sets: Mapping[str, Iterable[str]] | None = None,
    candidate_scenes: Mapping[str, Sequence[str]] | None = None,
    warnings: Sequence[str] = (),
) -> AugmentationPlan:
    """Accept targets whose clean set is large enough and sample S.

    Sampling is uniform without replacement over the sorted clean set,
    seeded per target from (seed, object name): the result depends only
    on the set contents, parameters and seed, never on input order.
    """
    if min_clean_size < 1:
        raise ValueError("min_clean_size must be >= 1")
    if cap < 1:
        raise ValueError("cap must be >= 1")
    targets: list[TargetPlan] = []
    for object_name, g_iter in g_sets.items():
        g_ids = sorted(set(g_iter))
        q_ids = sorted(set(q_sets[object_name])) if q_sets is not None else list(g_ids)
        if not set(g_ids) <= set(q_ids):
            raise ValueError(f"clean set for {object_name!r} is not a subset of its pool set")
        accepted = len(g_ids) >= min_clean_size
        if accepted:
            rng = random.Random(f"{seed}:{object_name}")
            s_ids = tuple(sorted(rng.sample(g_ids, min(len(g_ids), cap))))
        else:
            s_ids = ()
        scenes = tuple(candidate_scenes.get(object_name, ())) if candidate_scenes else ()
        targets.append(
            TargetPlan(
                object_name=object_name,
                candidate_scenes=scenes,
                q_ids=tuple(q_ids),
                g_ids=tuple(g_ids),
                accepted=accepted,
                s_ids=s_ids,
            )
        )
    return AugmentationPlan(
        targets=tuple(targets),
        min_clean_size=min_clean_size,
        cap=cap,
        seed=seed,
        warnings=tuple(warnings),
    )


def build_plan(
    pool: Sequence[ScenePoolEntry],
    candidates: CandidateSet,
    target_object_names: Sequence[str],
    min_clean_size: int,
    cap: int,
    seed: int,
) -> AugmentationPlan:
    """collect -> clean -> finalize in one call."""
    q_sets, warnings = collect_pool(pool, candidates)
    g_sets = {
        name: clean_pool(q_ids, pool, target_object_names)
        for name, q_ids in q_sets.items()
    }
    scenes = {name: candidates.scenes_for(name) for name in q_sets}
    plan = finalize_plan(
        g_sets,
        min_clean_size=min_clean_size,
        cap=cap,
        seed=seed,
        q_sets=q_sets,
        candidate_scenes=scenes,
        warnings=warnings,
    )
    return plan


def emit_augmented_manifest(base: DatasetManifest, plan: AugmentationPlan) -> DatasetManifest:
    """Append one scene class and its sampled records per accepted target.

    Base records pass through untouched. Added record ids are namespaced
    as ``scene_for_<object>/<pool id>`` so one pool image feeding several
    targets cannot collide.
    """
    new_scenes = [scene_class_name(t.object_name) for t in plan.accepted_targets]
    for name in new_scenes:
        if name in base.space:
            raise ValueError(f"scene class {name!r} collides with an existing class")
    for target in plan.accepted_targets:
        if target.object_name not in base.space:
            raise ValueError(f"target object {target.object_name!r} is not in the base label space")
    space = build_label_space(
        base.space.object_names, tuple(base.space.scene_names) + tuple(new_scenes)
    )
    records = list(base.records)
    existing = {record.image_id for record in records}
    for target in plan.accepted_targets:
        label = frozenset({space.id_of(scene_class_name(target.object_name))})
        for image_id in target.s_ids:
            record_id = f"{scene_class_name(target.object_name)}/{image_id}"
            if record_id in existing:
                raise ValueError(f"augmented record id {record_id!r} collides with an existing record")
            existing.add(record_id)
            records.append(ImageRecord(record_id, label, None, Source.SCENE_POOL))
    provenance = base.provenance
    note = plan_note(plan)
    provenance = f"{provenance}\n{note}" if provenance else note
    return DatasetManifest(space, tuple(records), provenance)


def plan_note(plan: AugmentationPlan) -> str:
    parts = [
        f"augmented with {len(plan.accepted_targets)} scene class(es), "
        f"{plan.total_added} record(s), seed={plan.seed}"
    ]
    shared = _shared_images(plan)
    if shared:
        parts.append(f"{shared} pool image(s) serve multiple targets")
    return "; ".join(parts)


def _shared_images(plan: AugmentationPlan) -> int:
    seen: set[str] = set()
    shared = 0
    for target in plan.accepted_targets:
        for image_id in target.s_ids:
            if image_id in seen:
                shared += 1
            seen.add(image_id)
    return shared


def format_plan_report(plan: AugmentationPlan) -> str:
    """The human-facing plan summary."""
    lines = [
        "Augmentation plan",
        f"  min_clean_size={plan.min_clean_size}  cap={plan.cap}  seed={plan.seed}",
    ]
    for target in plan.targets:
        status = "accepted" if target.accepted else "rejected (clean set too small)"
        lines.append(f"  target {target.object_name}: {status}")
        lines.append(f"    candidate scenes: {', '.join(target.candidate_scenes) or '(none)'}")
        lines.append(
            f"    |Q|={len(target.q_ids)}  |G|={len(target.g_ids)}  |S|={len(target.s_ids)}"
        )
    for warning in plan.warnings:
        lines.append(f"  warning: {warning}")
    lines.append(f"  total records to add: {plan.total_added}")
    return "\n".join(lines) + "\n"


def write_plan_json(plan: AugmentationPlan, path) -> None:
    payload = {
        "min_clean_size": plan.min_clean_size,
        "cap": plan.cap,
        "seed": plan.seed,
        "warnings": list(plan.warnings),
        "targets": [
            {
                "object_name": t.object_name,
                "candidate_scenes": list(t.candidate_scenes),
                "q_ids": list(t.q_ids),
                "g_ids": list(t.g_ids),
                "accepted": t.accepted,
                "s_ids": list(t.s_ids),
            }
            for t in plan.targets
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def read_plan_json(path) -> AugmentationPlan:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    targets = tuple(
        TargetPlan(
            object_name=t["object_name"],
            candidate_scenes=tuple(t["candidate_scenes"]),
            q_ids=tuple(t["q_ids"]),
            g_ids=tuple(t["g_ids"]),
            accepted=bool(t["accepted"]),
            s_ids=tuple(t["s_ids"]),
        )
        for t in payload["targets"]
    )
    return AugmentationPlan(
        targets=targets,
        min_clean_size=int(payload["min_clean_size"]),
        cap=int(payload["cap"]),
        seed=int(payload["seed"]),
        warnings=tuple(payload.get("warnings", ())),
    )
