"""Shared fixtures and small builders used across the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from scenerec import cooccurrence, model
from scenerec.ingestion import ScenePoolEntry, ScenePrediction


@pytest.fixture
def voc_space():
    return model.build_label_space(model.VOC_CLASSES)


@pytest.fixture
def tiny_space():
    return model.build_label_space(("background", "boat", "person"))


def make_matrix(counts, k=5, scene_names=None, object_names=None):
    counts = np.asarray(counts, dtype=np.int64)
    h, n = counts.shape
    if scene_names is None:
        scene_names = tuple(f"s{i}" for i in range(h))
    if object_names is None:
        object_names = tuple(f"o{j}" for j in range(n))
    return cooccurrence.CooccurrenceMatrix(counts, tuple(scene_names), tuple(object_names), k)


@pytest.fixture
def three_image_corpus(tiny_space):
    """Hand-checked corpus: expected counts derived by hand.

    With k=2:
      a  (boat)         -> harbor, beach
      b  (boat, person) -> harbor, city
      c  (person)       -> city, beach
    giving rows (beach, city, harbor) x columns (boat, person):
      beach  1 1
      city   1 2
      harbor 2 1
    """
    predictions = [
        ScenePrediction("a", (("harbor", 0.9), ("beach", 0.5), ("city", 0.1))),
        ScenePrediction("b", (("harbor", 0.8), ("city", 0.4), ("beach", 0.2))),
        ScenePrediction("c", (("city", 0.7), ("beach", 0.6), ("harbor", 0.2))),
    ]
    boat = tiny_space.id_of("boat")
    person = tiny_space.id_of("person")
    manifest = model.DatasetManifest(
        tiny_space,
        (
            model.ImageRecord("a", frozenset({boat}), None, model.Source.TARGET_DATASET),
            model.ImageRecord("b", frozenset({boat, person}), None, model.Source.TARGET_DATASET),
            model.ImageRecord("c", frozenset({person}), None, model.Source.TARGET_DATASET),
        ),
    )
    return predictions, manifest


def make_pool(spec):
    """spec: iterable of (image_id, scene, tags) triples."""
    return [ScenePoolEntry(i, s, frozenset(t)) for i, s, t in spec]
