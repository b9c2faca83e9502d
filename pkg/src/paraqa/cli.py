"""Command line interface.

Every subcommand reads and writes the JSON-Lines formats defined by the
library modules, logs JSON lines to stderr, and exits non-zero with a
final error line when something goes wrong. Interrupting a long command
leaves its progress in ``<out>.partial``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import aligner, condenser, config as config_mod, evalharness, fusion, manifest, qagen, segmenter
from .labels import EmotionCategory, LabelError
from .llmclient import ClientError


def log(event: str, level: str = "info", **fields) -> None:
    record = {"ts": round(time.time(), 3), "level": level, "event": event}
    record.update(fields)
    print(json.dumps(record, ensure_ascii=False), file=sys.stderr)


def _load_config(args) -> config_mod.PipelineConfig:
    cfg = config_mod.load_config(args.config, args.profile)
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "workers", None) is not None:
        overrides["workers"] = args.workers
    return replace(cfg, **overrides) if overrides else cfg


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise config_mod.ConfigError(f"bad grid value in {text!r}") from None


def _parse_categories(text: str) -> tuple[EmotionCategory, ...]:
    return tuple(EmotionCategory.parse(c) for c in text.split(",") if c.strip())


def cmd_plan(args) -> int:
    cfg = _load_config(args)
    if args.from_vad:
        samples = segmenter.samples_from_voiced_spans(args.infile)
    else:
        samples = manifest.read_audio_manifest(args.infile)
    if args.target == "gender":
        t_s, delta_t_s = cfg.gender_t_s, cfg.gender_delta_t_s
    else:
        t_s, delta_t_s = cfg.t_s, cfg.delta_t_s
    planned = segmenter.plan_samples(samples, t_s, delta_t_s)
    n = segmenter.write_window_plans(args.out, planned)
    log("plan", target=args.target, samples=n, out=args.out)
    return 0


def cmd_fuse(args) -> int:
    categorical = []
    for path in args.categorical:
        categorical.extend(fusion.read_categorical_fragments(path))
    dimensional = fusion.read_dimensional_fragments(args.dimensional)
    gender = fusion.read_gender_fragments(args.gender) if args.gender else []
    durations = None
    if args.audio:
        durations = {s.sample_id: s.duration_s for s in manifest.read_audio_manifest(args.audio)}
    streams = fusion.fuse_streams(categorical, dimensional, gender, durations=durations)
    n = manifest.write_label_streams(args.out, streams)
    log("fuse", samples=n, out=args.out)
    return 0


def cmd_condense(args) -> int:
    cfg = _load_config(args)
    streams = manifest.read_label_streams(args.infile)
    uris = None
    if args.audio:
        uris = {s.sample_id: s.audio_uri for s in manifest.read_audio_manifest(args.audio)}
    samples = condenser.condense(streams, cfg.thresholds(), audio_uris=uris)
    n = manifest.write_condensed(args.out, samples)
    log("condense", streams=len(streams), kept=n, out=args.out)
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    grid_x = _parse_grid(args.grid_x) if args.grid_x else cfg.grid_x
    grid_y = _parse_grid(args.grid_y) if args.grid_y else cfg.grid_y
    gold = fusion.read_gold_streams(args.infile)
    result = fusion.sweep_thresholds(gold, grid_x, grid_y)
    fusion.write_sweep_csv(args.out, result)
    if args.summary:
        fusion.write_sweep_summary(args.summary, result)
    x, y, uwa = result.best
    log("sweep", best_x=x, best_y=y, best_uwa=round(uwa, 2), out=args.out)
    return 0


def cmd_align(args) -> int:
    cfg = _load_config(args)
    transcripts = aligner.read_transcripts(args.words)
    streams = manifest.read_label_streams(args.streams)
    if not args.raw_labels:
        thresholds = cfg.thresholds()
        streams = [condenser.consistency_relabel(s, thresholds) for s in streams]
    by_sample = {s.sample_id: s for s in streams}
    aligned = []
    for record in transcripts:
        stream = by_sample.get(record.sample_id)
        if stream is None:
            raise manifest.ManifestError(
                f"{record.sample_id}: transcript has no label stream"
            )
        aligned.append(aligner.align_transcript(record, stream))
    n = aligner.write_aligned(args.out, aligned)
    log("align", transcripts=n, out=args.out)
    return 0


def cmd_genqa(args) -> int:
    cfg = _load_config(args)
    transcripts = aligner.read_aligned(args.infile)
    client = config_mod.build_text_client(cfg.generator, cfg.cache_dir)
    template = cfg.qa_template()
    rules = cfg.compiled_rules()

    # Batches bound how much work a cancellation can lose.
    batch = max(cfg.workers * 4, 8)
    pairs: list[qagen.QAPair] = []
    reports = []
    try:
        for i in range(0, len(transcripts), batch):
            chunk_pairs, report = qagen.generate(
                transcripts[i : i + batch],
                client,
                template,
                keywords=cfg.filter_keywords,
                rules=rules,
                retries=cfg.retries,
                backoff_s=cfg.backoff_s,
                workers=cfg.workers,
            )
            pairs.extend(chunk_pairs)
            reports.append(report)
            log("genqa-progress", done=min(i + batch, len(transcripts)), total=len(transcripts))
    except KeyboardInterrupt:
        partial = f"{args.out}.partial"
        qagen.write_qa_pairs(partial, pairs)
        log("cancelled", level="warning", partial=partial, pairs=len(pairs))
        return 130
    qagen.write_qa_pairs(args.out, pairs)
    merged = qagen.merge_reports(reports)
    if args.report:
        qagen.write_report(args.report, merged)
    log(
        "genqa",
        pairs=merged.total,
        filtered_out=merged.filtered_out,
        failures=len(merged.failures),
        out=args.out,
    )
    return 0


def cmd_sample(args) -> int:
    cfg = _load_config(args)
    n = args.n if args.n is not None else cfg.n_per_category
    categories = _parse_categories(args.categories) if args.categories else cfg.sample_categories
    max_duration = args.max_duration if args.max_duration is not None else cfg.max_sample_duration_s
    samples = manifest.read_condensed(args.infile)
    chosen = condenser.balanced_sample(samples, n, categories, seed=cfg.seed, max_duration_s=max_duration)
    written = manifest.write_condensed(args.out, chosen)
    log("sample", n_per_category=n, categories=len(categories), total=written, out=args.out)
    return 0


def cmd_evaluate(args) -> int:
    cfg = _load_config(args)
    qa_pairs = sorted(qagen.read_qa_pairs(args.qa), key=lambda p: p.qa_id)
    audio = manifest.read_audio_manifest(args.audio)
    speech = config_mod.build_speech_client(cfg.speech, cfg.cache_dir)
    judge = config_mod.build_text_client(cfg.judge, cfg.cache_dir)
    eval_cfg = cfg.eval_config()
    categories = {p.qa_id: p.category.value for p in qa_pairs}

    batch = max(cfg.workers * 4, 8)
    records: list[evalharness.EvalRecord] = []
    failures: list[tuple[str, str]] = []
    try:
        for i in range(0, len(qa_pairs), batch):
            chunk_records, chunk_summary = evalharness.evaluate(
                qa_pairs[i : i + batch], audio, speech, judge, eval_cfg
            )
            records.extend(chunk_records)
            failures.extend(chunk_summary.failures)
            log("evaluate-progress", done=min(i + batch, len(qa_pairs)), total=len(qa_pairs))
    except KeyboardInterrupt:
        partial = f"{args.out}.partial"
        evalharness.write_records(partial, records)
        log("cancelled", level="warning", partial=partial, records=len(records))
        return 130
    summary = evalharness.summarize(records, categories, failures)
    evalharness.write_records(args.out, records)
    if args.summary:
        evalharness.write_summary(args.summary, summary)
    log(
        "evaluate",
        scored=summary.n_scored,
        mean_score=round(summary.mean_score, 2),
        failures=len(failures),
        out=args.out,
    )
    return 0


def cmd_report(args) -> int:
    cfg = _load_config(args)
    payload: dict = {"config": config_mod.serialize(cfg)}
    if args.qa:
        pairs = qagen.read_qa_pairs(args.qa)
        by_category: dict[str, int] = {}
        by_source: dict[str, int] = {}
        for p in pairs:
            by_category[p.category.value] = by_category.get(p.category.value, 0) + 1
            by_source[p.source.value] = by_source.get(p.source.value, 0) + 1
        payload["qa"] = {
            "total": len(pairs),
            "by_category": dict(sorted(by_category.items())),
            "by_source": dict(sorted(by_source.items())),
        }
    if args.condensed:
        samples = manifest.read_condensed(args.condensed)
        per_category: dict[str, int] = {}
        for s in samples:
            for cat in s.categories:
                per_category[cat.value] = per_category.get(cat.value, 0) + 1
        payload["condensed"] = {
            "total": len(samples),
            "per_category": dict(sorted(per_category.items())),
            "total_duration_s": round(sum(s.duration_s for s in samples), 3),
        }
    Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    log("report", out=args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paraqa",
        description="Condense speech via paralinguistic labels and build QA evaluation sets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--profile", help="named profile to start from")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--workers", type=int, help="override config workers")

    p = sub.add_parser("plan", help="plan sliding windows over audio")
    common(p)
    p.add_argument("--in", dest="infile", required=True, help="audio manifest JSONL")
    p.add_argument("--out", required=True, help="window plan JSONL")
    p.add_argument("--target", choices=["emotion", "gender"], default="emotion")
    p.add_argument(
        "--from-vad",
        action="store_true",
        help="input is voice-activity spans; one sample per span",
    )
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("fuse", help="fuse per-model label fragments into streams")
    common(p)
    p.add_argument("--categorical", nargs="+", required=True, help="categorical fragment JSONL files")
    p.add_argument("--dimensional", required=True, help="dimensional fragment JSONL")
    p.add_argument("--gender", help="gender fragment JSONL")
    p.add_argument("--audio", help="audio manifest for durations")
    p.add_argument("--out", required=True, help="label stream JSONL")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("condense", help="filter label streams into a dataset")
    common(p)
    p.add_argument("--in", dest="infile", required=True, help="label stream JSONL")
    p.add_argument("--audio", help="audio manifest for URIs")
    p.add_argument("--out", required=True, help="condensed sample JSONL")
    p.set_defaults(func=cmd_condense)

    p = sub.add_parser("sweep", help="grid-search consistency thresholds against gold labels")
    common(p)
    p.add_argument("--in", dest="infile", required=True, help="gold label stream JSONL")
    p.add_argument("--out", required=True, help="UWA matrix CSV")
    p.add_argument("--summary", help="best-cell JSON")
    p.add_argument("--grid-x", help="comma-separated x values")
    p.add_argument("--grid-y", help="comma-separated y values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("align", help="attach emotion and gender labels to words")
    common(p)
    p.add_argument("--words", required=True, help="transcript JSONL with word times")
    p.add_argument("--streams", required=True, help="label stream JSONL")
    p.add_argument("--out", required=True, help="aligned transcript JSONL")
    p.add_argument(
        "--raw-labels",
        action="store_true",
        help="skip consistency relabeling before alignment",
    )
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("genqa", help="generate QA pairs from aligned transcripts")
    common(p)
    p.add_argument("--in", dest="infile", required=True, help="aligned transcript JSONL")
    p.add_argument("--out", required=True, help="QA pair JSONL")
    p.add_argument("--report", help="generation report JSON")
    p.set_defaults(func=cmd_genqa)

    p = sub.add_parser("sample", help="draw a balanced dataset from condensed samples")
    common(p)
    p.add_argument("--in", dest="infile", required=True, help="condensed sample JSONL")
    p.add_argument("--out", required=True, help="selected sample JSONL")
    p.add_argument("--n", type=int, help="samples per category")
    p.add_argument("--categories", help="comma-separated category names")
    p.add_argument("--max-duration", type=float, help="exclude samples longer than this")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("evaluate", help="score a speech model on a QA set")
    common(p)
    p.add_argument("--qa", required=True, help="QA pair JSONL")
    p.add_argument("--audio", required=True, help="audio manifest JSONL")
    p.add_argument("--out", required=True, help="per-pair record JSONL")
    p.add_argument("--summary", help="summary JSON")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="summarize datasets and echo the config")
    common(p)
    p.add_argument("--qa", help="QA pair JSONL")
    p.add_argument("--condensed", help="condensed sample JSONL")
    p.add_argument("--out", required=True, help="report JSON")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        manifest.ManifestError,
        config_mod.ConfigError,
        condenser.SamplingError,
        qagen.TemplateError,
        evalharness.ScoreParseError,
        ClientError,
        LabelError,
        ValueError,
        OSError,
    ) as exc:
        log("error", level="error", message=str(exc))
        return 2
    except KeyboardInterrupt:
        log("cancelled", level="warning")
        return 130


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
