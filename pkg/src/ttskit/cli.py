"""Single entry point exposing the toolkit as subcommands.

Exit codes: 0 success, 1 input/validation error, 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus as cm
from . import embed as em
from . import metrics as mx
from . import reports
from .audio import VadConfig, convert_pcm, read_wav, trim_silence, write_wav
from .errors import ToolkitError
from .features import MelConfig, log_mel, write_features
from .pipeline import PipelineConfig, run_pipeline
from .textnorm import NormConfig, load_abbreviations, normalize_text


def _rules_from_args(args) -> cm.SubsetRules:
    exclude = cm.load_exclusion_list(args.exclude) if args.exclude else frozenset()
    return cm.SubsetRules(
        min_duration_s=args.min_s, max_duration_s=args.max_s, exclude_ids=exclude
    )


def _add_rule_flags(p) -> None:
    p.add_argument("--min-s", type=float, default=10.0, help="minimum duration kept (inclusive)")
    p.add_argument("--max-s", type=float, default=15.0, help="maximum duration kept (inclusive)")
    p.add_argument("--exclude", help="file of utterance ids to drop (manual exclusions)")


def cmd_scan(args) -> int:
    manifest = cm.scan_corpus(args.root, name=args.name)
    cm.save_manifest(manifest, args.out)
    print(f"scanned {len(manifest)} utterances from {args.root} -> {args.out}")
    return 0


def cmd_classify(args) -> int:
    manifest = cm.load_manifest(args.manifest)
    classified = cm.classify_manifest(manifest, _rules_from_args(args))
    cm.save_manifest(classified, args.out)
    usable = sum(1 for u in classified.utterances if u.verdict and u.verdict.usable)
    print(f"classified {len(classified)} utterances ({usable} usable) -> {args.out}")
    return 0


def cmd_subset(args) -> int:
    manifest = cm.load_manifest(args.manifest)
    subset = cm.build_subset(manifest, _rules_from_args(args), name=args.name)
    cm.save_manifest(subset, args.out)
    print(f"kept {len(subset)}/{len(manifest)} utterances -> {args.out}")
    return 0


def cmd_report(args) -> int:
    manifest = cm.load_manifest(args.manifest)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    edges = [float(e) for e in args.buckets.split(",")] if args.buckets else cm.TABLE_EDGES_S
    hist = cm.bucket_durations(manifest, edges)
    (out_dir / "histogram.csv").write_text(reports.histogram_csv(hist), "utf-8")
    (out_dir / "histogram.txt").write_text(reports.histogram_text(hist), "utf-8")
    summary = reports.corpus_summary(manifest)
    (out_dir / "summary.csv").write_text(reports.summary_csv([summary]), "utf-8")
    (out_dir / "summary.txt").write_text(reports.summary_text([summary]), "utf-8")
    print(reports.histogram_text(hist))
    print(reports.summary_text([summary]))
    return 0


def cmd_prep_audio(args) -> int:
    src = Path(args.input)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = sorted(src.rglob("*.wav")) if src.is_dir() else [src]
    vad = VadConfig()
    for wav in files:
        buf = read_wav(wav)
        if args.trim:
            buf = trim_silence(buf, vad)
        prepped = convert_pcm(buf, args.rate, args.bits, taps=args.taps)
        write_wav(out_dir / wav.name, prepped)
    print(f"prepared {len(files)} file(s) at {args.rate} Hz/{args.bits}-bit -> {out_dir}")
    return 0


def cmd_melspec(args) -> int:
    buf = read_wav(args.input)
    cfg = MelConfig(source_rate=args.rate, n_mels=args.n_mels)
    if buf.sample_rate_hz != cfg.source_rate:
        buf = convert_pcm(buf, cfg.source_rate, 16)
    mel = log_mel(buf, cfg)
    write_features(args.out, mel, meta={"source": str(args.input)})
    print(f"{mel.n_frames} frames x {mel.n_mels} mels -> {args.out}")
    return 0


def cmd_norm_text(args) -> int:
    table = load_abbreviations(args.table) if args.table else None
    cfg = (
        NormConfig(abbreviations=table, punctuation_policy=args.policy, uppercase=not args.no_uppercase)
        if table is not None
        else NormConfig(punctuation_policy=args.policy, uppercase=not args.no_uppercase)
    )
    text_in = Path(args.input).read_text("utf-8") if args.input else sys.stdin.read()
    lines = [normalize_text(line, cfg) for line in text_in.splitlines()]
    out_text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(out_text, "utf-8")
    else:
        sys.stdout.write(out_text)
    return 0


def cmd_embed(args) -> int:
    if args.import_file and args.baseline:
        raise ToolkitError("bad_input", "--baseline and --import are mutually exclusive")
    if args.import_file:
        embeddings = em.read_embeddings(args.import_file)
    else:
        if not args.manifest:
            raise ToolkitError("bad_input", "--manifest required for baseline embedding")
        manifest = cm.load_manifest(args.manifest)
        cfg = MelConfig(source_rate=args.rate)
        embeddings = []
        for u in manifest.utterances:
            buf = read_wav(u.audio_path)
            if buf.sample_rate_hz != cfg.source_rate:
                buf = convert_pcm(buf, cfg.source_rate, 16)
            mel = log_mel(buf, cfg)
            embeddings.append(em.baseline_embed(mel, speaker_id=u.speaker_id, utterance_id=u.id))
    em.write_embeddings(args.out, embeddings)
    print(f"wrote {len(embeddings)} embeddings -> {args.out}")
    return 0


def cmd_similarity(args) -> int:
    set_a = em.group_by_speaker(em.read_embeddings(args.set_a))
    set_b = em.group_by_speaker(em.read_embeddings(args.set_b))
    matrix = em.cross_similarity(set_a, set_b)
    csv_text = reports.similarity_csv(matrix)
    if args.out:
        Path(args.out).write_text(csv_text, "utf-8")
    print(csv_text)
    return 0


def _read_scores(path: str) -> list[float]:
    return [float(line) for line in Path(path).read_text("utf-8").split()]


def cmd_eer(args) -> int:
    result = em.compute_eer(_read_scores(args.genuine), _read_scores(args.impostor))
    payload = {"eer": result.eer, "threshold": result.threshold}
    if args.out:
        Path(args.out).write_text(json.dumps(payload, sort_keys=True) + "\n", "utf-8")
    print(f"EER {result.eer:.4f} at threshold {result.threshold:.6g}")
    return 0


def cmd_project2d(args) -> int:
    embeddings = em.read_embeddings(args.embeddings)
    coords = em.project_2d(embeddings, seed=args.seed)
    lines = ["utterance_id,speaker_id,x,y"]
    for e, (x, y) in zip(embeddings, coords):
        lines.append(f"{e.utterance_id},{e.speaker_id},{x:.8g},{y:.8g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, "utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_wer(args) -> int:
    refs = Path(args.ref).read_text("utf-8").splitlines()
    hyps = Path(args.hyp).read_text("utf-8").splitlines()
    if len(refs) != len(hyps):
        raise ToolkitError("bad_input", f"ref has {len(refs)} lines, hyp has {len(hyps)}")
    pairs = [(r.split(), h.split()) for r, h in zip(refs, hyps)]
    total = mx.corpus_wer(pairs)
    print(
        f"WER {total.wer * 100:.2f} (S={total.substitutions} D={total.deletions} "
        f"I={total.insertions} N={total.ref_len})"
    )
    if args.out:
        Path(args.out).write_text(
            reports.wer_table_csv([(args.label, len(pairs), total.wer * 100)]), "utf-8"
        )
    if args.per_utterance:
        lines = ["line,substitutions,deletions,insertions,ref_len,wer"]
        for k, (ref, hyp) in enumerate(pairs, 1):
            r = mx.wer(ref, hyp)
            lines.append(f"{k},{r.substitutions},{r.deletions},{r.insertions},{r.ref_len},{r.wer:.6f}")
        Path(args.per_utterance).write_text("\n".join(lines) + "\n", "utf-8")
    return 0


def cmd_mos(args) -> int:
    ratings = mx.load_ratings_csv(args.ratings)
    categories = sorted({r.category for r in ratings})
    results = [(c, mx.aggregate_mos(ratings, c)) for c in categories]
    csv_text = reports.mos_table_csv(results)
    if args.out:
        Path(args.out).write_text(csv_text, "utf-8")
    print(csv_text)
    return 0


def cmd_compare(args) -> int:
    report = mx.compare_score_sets(
        _read_scores(args.set_a), _read_scores(args.set_b), args.label_a, args.label_b
    )
    csv_text = reports.comparison_csv(report)
    if args.out:
        Path(args.out).write_text(csv_text, "utf-8")
    print(csv_text)
    return 0


def cmd_select_speakers(args) -> int:
    manifest = cm.load_manifest(args.manifest)
    selection = mx.select_eval_speakers(manifest, top_k=args.top_k, n_select=args.n, seed=args.seed)
    payload = {
        "seed": selection.seed,
        "selected": list(selection.speaker_ids),
        "pool": list(selection.pool),
    }
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n", "utf-8")
    print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(args.config)
    return 0


def cmd_pipeline(args) -> int:
    config = PipelineConfig.from_file(args.config)
    if args.out:
        config.out_dir = args.out
    if args.seed is not None:
        config.seed = args.seed
    summary = run_pipeline(config)
    print(
        f"pipeline done: {summary['subset']['utterances']}/{summary['full']['utterances']} "
        f"utterances kept -> {config.out_dir}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ttskit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="walk a corpus tree into a manifest")
    p.add_argument("--root", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--name")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("classify", help="attach usability verdicts to a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    _add_rule_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("subset", help="keep only usable utterances")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--name")
    _add_rule_flags(p)
    p.set_defaults(func=cmd_subset)

    p = sub.add_parser("report", help="duration histogram and corpus summary tables")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", default="reports")
    p.add_argument("--buckets", help="comma-separated bucket edges in seconds")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("prep-audio", help="resample/quantize WAVs (optionally trim silence)")
    p.add_argument("--input", required=True, help="WAV file or directory")
    p.add_argument("--out", required=True)
    p.add_argument("--rate", type=int, default=24000)
    p.add_argument("--bits", type=int, default=16)
    p.add_argument("--taps", type=int, default=64)
    p.add_argument("--trim", action="store_true")
    p.set_defaults(func=cmd_prep_audio)

    p = sub.add_parser("melspec", help="log-mel features for one WAV")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rate", type=int, default=16000)
    p.add_argument("--n-mels", type=int, default=40)
    p.set_defaults(func=cmd_melspec)

    p = sub.add_parser("norm-text", help="normalize transcript text")
    p.add_argument("--input", help="input file (default: stdin)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--table", help="abbreviation table file")
    p.add_argument("--policy", choices=["strip", "keep_sentence_final"], default="strip")
    p.add_argument("--no-uppercase", action="store_true")
    p.set_defaults(func=cmd_norm_text)

    p = sub.add_parser("embed", help="baseline embeddings from a manifest, or import a file")
    p.add_argument("--manifest")
    p.add_argument("--baseline", action="store_true", help="use the deterministic baseline embedder (default)")
    p.add_argument("--import", dest="import_file", help="ingest externally computed embeddings")
    p.add_argument("--out", required=True)
    p.add_argument("--rate", type=int, default=16000)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("similarity", help="cross-similarity matrix between two embedding sets")
    p.add_argument("--set-a", required=True)
    p.add_argument("--set-b", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_similarity)

    p = sub.add_parser("eer", help="equal error rate from genuine/impostor score files")
    p.add_argument("--genuine", required=True)
    p.add_argument("--impostor", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eer)

    p = sub.add_parser("project2d", help="2-D principal-axes projection of embeddings")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_project2d)

    p = sub.add_parser("wer", help="word error rate between reference and hypothesis files")
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--out")
    p.add_argument("--label", default="corpus")
    p.add_argument("--per-utterance", help="also write a per-line breakdown CSV")
    p.set_defaults(func=cmd_wer)

    p = sub.add_parser("mos", help="MOS per category from a ratings CSV")
    p.add_argument("--ratings", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_mos)

    p = sub.add_parser("compare", help="paired score-set comparison (means, CI, difference)")
    p.add_argument("--set-a", required=True)
    p.add_argument("--set-b", required=True)
    p.add_argument("--label-a", default="set_a")
    p.add_argument("--label-b", default="set_b")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("select-speakers", help="seeded selection among the top-minutes speakers")
    p.add_argument("--manifest", required=True)
    p.add_argument("--top-k", type=int, default=20)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_select_speakers)

    p = sub.add_parser("serve", help="run the listening-test service")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("pipeline", help="scan -> subset -> prep -> norm -> embed")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="override output directory")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ToolkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # internal error
        print(f"internal error: {e!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
