"""Command-line front end.

Subcommands mirror the pipeline stages; every parameter can come from a
``key=value`` config file (``--config``), with flags taking precedence.
All outputs land in the ``--out`` directory under fixed names so stages
chain by pointing at each other's files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from scenerec import (
    cooccurrence,
    curation,
    evaluation,
    heatmap,
    ingestion,
    model,
    recommend,
    synth,
)
from scenerec.errors import ParseError, SceneRecError

DEFAULTS = {
    "top_k": 5,
    "threshold_T": 0.3,
    "top_n": 11,
    "min_clean_size": 1000,
    "cap": 5000,
    "seed": 0,
    "tol": 0.05,
    "threads": 1,
}

_CASTS = {
    "top_k": int,
    "top_n": int,
    "min_clean_size": int,
    "cap": int,
    "seed": int,
    "threads": int,
    "threshold_T": float,
    "tol": float,
}


def load_config(path) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(f"expected key=value, got {line!r}", path, lineno)
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


class Settings:
    """Flag > config file > default resolution."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = load_config(args.config) if getattr(args, "config", None) else {}

    def value(self, key: str):
        from_flag = getattr(self.args, key, None)
        if from_flag is not None:
            return from_flag
        if key in self.config:
            cast = _CASTS.get(key, str)
            return cast(self.config[key])
        return DEFAULTS.get(key)

    def path(self, key: str, required: bool = True) -> Path | None:
        value = self.value(key)
        if value is None:
            if required:
                raise SceneRecError(f"missing required input: --{key.replace('_', '-')} (or config key {key})")
            return None
        return Path(value)

    def out_dir(self) -> Path:
        out = self.path("out")
        out.mkdir(parents=True, exist_ok=True)
        return out


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def cmd_cooc(settings: Settings) -> int:
    vocab_path = settings.path("scene_vocab", required=False)
    vocabulary = ingestion.parse_class_names(vocab_path) if vocab_path else None
    predictions = ingestion.parse_predictions(settings.path("predictions"), vocabulary)
    manifest = model.parse_manifest(settings.path("manifest"))
    matrix = cooccurrence.build_cooccurrence(
        predictions,
        manifest,
        settings.value("top_k"),
        scene_names=vocabulary,
        threads=settings.value("threads"),
    )
    out = settings.out_dir() / "cooccurrence.csv"
    cooccurrence.write_cooccurrence_csv(matrix, out)
    print(f"{matrix.shape[0]}x{matrix.shape[1]} co-occurrence matrix -> {out}")
    return 0


def cmd_recommend(settings: Settings) -> int:
    matrix = cooccurrence.read_cooccurrence_csv(settings.path("cooc"))
    threshold = settings.value("threshold_T")
    entries = recommend.score_scenes(matrix, threshold)
    candidates = recommend.select_candidates(entries, settings.value("top_n"), threshold)
    out = settings.out_dir()
    recommend.write_candidates_csv(candidates, out / "candidates.csv")
    summary = recommend.summarize_candidates(candidates)
    (out / "candidates.txt").write_text(summary, encoding="utf-8")
    if not candidates.entries:
        _warn("no candidates passed the threshold")
    print(summary, end="")
    return 0


def cmd_clean(settings: Settings) -> int:
    candidates = recommend.read_candidates_csv(settings.path("candidates"))
    pool = ingestion.parse_pool(settings.path("pool"))
    manifest = model.parse_manifest(settings.path("manifest"))
    plan = curation.build_plan(
        pool,
        candidates,
        target_object_names=manifest.space.foreground_names,
        min_clean_size=settings.value("min_clean_size"),
        cap=settings.value("cap"),
        seed=settings.value("seed"),
    )
    out = settings.out_dir()
    curation.write_plan_json(plan, out / "plan.json")
    report = curation.format_plan_report(plan)
    (out / "plan.txt").write_text(report, encoding="utf-8")
    for warning in plan.warnings:
        _warn(warning)
    print(report, end="")
    return 0


def cmd_augment(settings: Settings) -> int:
    manifest = model.parse_manifest(settings.path("manifest"))
    plan = curation.read_plan_json(settings.path("plan"))
    augmented = curation.emit_augmented_manifest(manifest, plan)
    out = settings.out_dir() / "augmented_manifest.tsv"
    model.write_manifest(augmented, out)
    print(
        f"{len(augmented.records)} records ({len(manifest.records)} base + "
        f"{plan.total_added} added), {augmented.space.num_classes} classes -> {out}"
    )
    return 0


def cmd_eval(settings: Settings) -> int:
    names = ingestion.parse_class_names(settings.path("classes"))
    space = model.build_label_space(names)
    confusion = evaluation.evaluate_mask_dirs(
        settings.path("pred_dir"),
        settings.path("gt_dir"),
        space,
        threads=settings.value("threads"),
    )
    report = evaluation.compute_iou(confusion)
    normalized = evaluation.normalize_confusion(confusion)
    out = settings.out_dir()
    evaluation.write_confusion_csv(confusion, out / "confusion_counts.csv")
    evaluation.write_normalized_csv(normalized, out / "confusion_normalized.csv")
    (out / "iou_report.txt").write_text(evaluation.format_iou_report(report), encoding="utf-8")
    evaluation.write_iou_csv(report, out / "iou_report.csv")
    for name, value, ok in zip(report.class_names, report.per_class, report.defined):
        print(f"{name:>16s} : {value:.4f}" if ok else f"{name:>16s} : undefined")
    print(f"{'mean IoU':>16s} : {report.mean_iou:.4f}")
    return 0


def cmd_verify_table(settings: Settings) -> int:
    table = ingestion.parse_published_table(settings.path("table"))
    check = evaluation.verify_published_means(table, settings.value("tol"))
    text = evaluation.format_table_check(check)
    print(text, end="")
    delta_spec = settings.value("deltas")
    if delta_spec:
        ours_name, _, baseline_name = delta_spec.partition(":")
        deltas = evaluation.compute_deltas(
            table.row(ours_name), table.row(baseline_name), table.class_names
        )
        delta_text = evaluation.format_deltas(deltas)
        print(delta_text, end="")
    out = settings.path("out", required=False)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "table_check.txt").write_text(text, encoding="utf-8")
    return 0 if check.all_passed else 1


def cmd_figure(settings: Settings) -> int:
    confusion = evaluation.read_confusion_csv(settings.path("counts"))
    normalized = evaluation.normalize_confusion(confusion)
    out = settings.out_dir()
    heatmap.export_heatmap(
        normalized,
        out / "heatmap.svg",
        out / "heatmap.csv",
        title=settings.value("title") or "confusion",
    )
    print(f"heatmap -> {out / 'heatmap.svg'}")
    return 0


def _parse_plants(specs) -> tuple[tuple[str, str, float], ...]:
    plants = []
    for spec in specs or ():
        parts = spec.split(":")
        if len(parts) != 3:
            raise SceneRecError(f"--plant expects object:scene:strength, got {spec!r}")
        plants.append((parts[0], parts[1], float(parts[2])))
    return tuple(plants)


def cmd_synth(settings: Settings) -> int:
    args = settings.args

    def names(text):
        return tuple(text.split(",")) if text else None

    config = synth.SynthConfig(
        n_objects=args.objects,
        n_scenes=args.scenes,
        n_images=args.images,
        k=settings.value("top_k"),
        seed=settings.value("seed"),
        affinity=_parse_plants(args.plant),
        pool_size=args.pool_size,
        pool_contamination=args.contamination,
        object_names=names(args.object_names),
        scene_names=names(args.scene_names),
    )
    corpus = synth.generate_corpus(config)
    out = settings.out_dir()
    synth.write_corpus(corpus, out)
    print(
        f"corpus: {len(corpus.predictions)} predictions, {len(corpus.pool)} pool images, "
        f"{len(corpus.expected_pairs)} planted pair(s) -> {out}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scenerec",
        description="Recommend scene-context classes for a weakly labeled dataset and "
        "evaluate segmentation predictions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, *keys: str) -> None:
        p.add_argument("--config", help="key=value config file; flags override it")
        p.add_argument("--out", help="output directory")
        if "threshold_T" in keys:
            p.add_argument("--threshold-T", dest="threshold_T", type=float,
                           help="exclusivity threshold (default 0.3)")
        if "top_n" in keys:
            p.add_argument("--top-n", dest="top_n", type=int, help="candidates kept (default 11)")
        if "top_k" in keys:
            p.add_argument("--top-k", dest="top_k", type=int,
                           help="scene predictions used per image (default 5)")
        if "min_clean_size" in keys:
            p.add_argument("--min-clean-size", dest="min_clean_size", type=int,
                           help="smallest acceptable clean set (default 1000)")
        if "cap" in keys:
            p.add_argument("--cap", type=int, help="max sampled images per scene class (default 5000)")
        if "seed" in keys:
            p.add_argument("--seed", type=int, help="sampling seed (default 0)")
        if "tol" in keys:
            p.add_argument("--tol", type=float, help="mean-check tolerance (default 0.05)")
        if "threads" in keys:
            p.add_argument("--threads", type=int, help="worker threads (default 1)")

    p = sub.add_parser("cooc", help="build the scene-object co-occurrence matrix")
    p.add_argument("--predictions", help="predictions.tsv")
    p.add_argument("--manifest", help="dataset manifest")
    p.add_argument("--scene-vocab", dest="scene_vocab", help="newline-delimited scene vocabulary")
    add_common(p, "top_k", "threads")
    p.set_defaults(handler=cmd_cooc)

    p = sub.add_parser("recommend", help="score scenes and select candidates")
    p.add_argument("--cooc", help="co-occurrence CSV from the cooc subcommand")
    add_common(p, "threshold_T", "top_n")
    p.set_defaults(handler=cmd_recommend)

    p = sub.add_parser("clean", help="collect, clean and sample the scene pool")
    p.add_argument("--candidates", help="candidates CSV from the recommend subcommand")
    p.add_argument("--pool", help="scene pool TSV")
    p.add_argument("--manifest", help="dataset manifest (defines the target classes)")
    add_common(p, "min_clean_size", "cap", "seed")
    p.set_defaults(handler=cmd_clean)

    p = sub.add_parser("augment", help="emit the augmented manifest from a plan")
    p.add_argument("--manifest", help="base dataset manifest")
    p.add_argument("--plan", help="plan.json from the clean subcommand")
    add_common(p)
    p.set_defaults(handler=cmd_augment)

    p = sub.add_parser("eval", help="confusion matrix + IoU over mask directories")
    p.add_argument("--pred-dir", dest="pred_dir", help="predicted masks (*.png)")
    p.add_argument("--gt-dir", dest="gt_dir", help="ground-truth masks (*.png)")
    p.add_argument("--classes", help="newline-delimited class names, background first")
    add_common(p, "threads")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("verify-table", help="recompute published per-class means")
    p.add_argument("--table", help="published table (TSV/CSV)")
    p.add_argument("--deltas", help="OURS:BASELINE row names to diff")
    add_common(p, "tol")
    p.set_defaults(handler=cmd_verify_table)

    p = sub.add_parser("figure", help="render a confusion-matrix heatmap (SVG + CSV)")
    p.add_argument("--counts", help="confusion counts CSV from the eval subcommand")
    p.add_argument("--title", help="figure title")
    add_common(p)
    p.set_defaults(handler=cmd_figure)

    p = sub.add_parser("synth", help="generate a synthetic corpus with planted affinities")
    p.add_argument("--objects", type=int, default=4, help="number of object classes")
    p.add_argument("--scenes", type=int, default=12, help="number of scene classes")
    p.add_argument("--images", type=int, default=200, help="images per object")
    p.add_argument("--plant", action="append", help="object:scene:strength (repeatable)")
    p.add_argument("--pool-size", dest="pool_size", type=int, default=0,
                   help="pool images per planted scene")
    p.add_argument("--contamination", type=float, default=0.0,
                   help="probability a pool image is tagged with its target object")
    p.add_argument("--object-names", dest="object_names", help="comma-separated object names")
    p.add_argument("--scene-names", dest="scene_names", help="comma-separated scene names")
    add_common(p, "top_k", "seed")
    p.set_defaults(handler=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = Settings(args)
        return args.handler(settings)
    except SceneRecError as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
