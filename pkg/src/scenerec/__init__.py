"""Scene-context recommendation and segmentation evaluation toolkit.

The package turns top-k scene-classifier predictions plus image-level
object labels into a scene-object co-occurrence matrix, recommends scene
classes that are strongly and exclusively tied to individual objects,
curates an augmented training manifest from a scene-image pool, and
evaluates segmentation masks (confusion matrices, per-class IoU,
published-table verification, SVG heatmaps).
"""

from scenerec.cooccurrence import (
    CooccurrenceMatrix,
    build_cooccurrence,
    merge_cooccurrence,
    read_cooccurrence_csv,
    write_cooccurrence_csv,
)
from scenerec.curation import (
    AugmentationPlan,
    TargetPlan,
    build_plan,
    clean_pool,
    collect_pool,
    emit_augmented_manifest,
    finalize_plan,
    scene_class_name,
)
from scenerec.errors import ParseError, PipelineError, SceneRecError
from scenerec.evaluation import (
    ConfusionMatrix,
    DeltaReport,
    IoUReport,
    NormalizedConfusion,
    TableCheck,
    accumulate_confusion,
    compute_deltas,
    compute_iou,
    empty_confusion,
    evaluate_mask_dirs,
    merge_confusion,
    normalize_confusion,
    verify_published_means,
)
from scenerec.heatmap import export_heatmap, render_heatmap_svg
from scenerec.ingestion import (
    PublishedTable,
    ScenePoolEntry,
    ScenePrediction,
    SegMask,
    parse_class_names,
    parse_indexed_mask,
    parse_pool,
    parse_predictions,
    parse_published_table,
    write_indexed_mask,
)
from scenerec.model import (
    BACKGROUND,
    IGNORE_VALUE,
    VOC_CLASSES,
    DatasetManifest,
    ImageRecord,
    LabelSpace,
    Source,
    build_label_space,
    parse_manifest,
    validate_manifest,
    write_manifest,
)
from scenerec.pipeline import Corpus, PipelineResult, run_pipeline
from scenerec.recommend import (
    CandidateSet,
    SceneScoreEntry,
    brute_force_candidates,
    score_scenes,
    select_candidates,
)
from scenerec.synth import SynthConfig, generate_corpus, read_corpus, write_corpus

__version__ = "0.1.0"

__all__ = [
    "AugmentationPlan",
    "BACKGROUND",
    "CandidateSet",
    "ConfusionMatrix",
    "CooccurrenceMatrix",
    "Corpus",
    "DatasetManifest",
    "DeltaReport",
    "IGNORE_VALUE",
    "ImageRecord",
    "IoUReport",
    "LabelSpace",
    "NormalizedConfusion",
    "ParseError",
    "PipelineError",
    "PipelineResult",
    "PublishedTable",
    "SceneRecError",
    "ScenePoolEntry",
    "ScenePrediction",
    "SceneScoreEntry",
    "SegMask",
    "Source",
    "SynthConfig",
    "TableCheck",
    "TargetPlan",
    "VOC_CLASSES",
    "accumulate_confusion",
    "brute_force_candidates",
    "build_cooccurrence",
    "build_label_space",
    "build_plan",
    "clean_pool",
    "collect_pool",
    "compute_deltas",
    "compute_iou",
    "emit_augmented_manifest",
    "empty_confusion",
    "evaluate_mask_dirs",
    "export_heatmap",
    "finalize_plan",
    "generate_corpus",
    "merge_confusion",
    "merge_cooccurrence",
    "normalize_confusion",
    "parse_class_names",
    "parse_indexed_mask",
    "parse_manifest",
    "parse_pool",
    "parse_predictions",
    "parse_published_table",
    "read_cooccurrence_csv",
    "read_corpus",
    "render_heatmap_svg",
    "run_pipeline",
    "scene_class_name",
    "score_scenes",
    "select_candidates",
    "validate_manifest",
    "verify_published_means",
    "write_corpus",
    "write_cooccurrence_csv",
    "write_indexed_mask",
    "write_manifest",
]
