"""Report shaping: CSV and aligned-text tables for corpus comparisons,
MOS summaries, paired comparisons, similarity matrices, and WER."""

from __future__ import annotations

import csv
import io

from .corpus import CorpusManifest, DurationHistogram, speaker_stats
from .embed import SimilarityMatrix
from .metrics import ComparisonReport, MosResult


def format_mos(m: MosResult, decimals: int = 2) -> str:
    mean = f"{m.mean:.{decimals}f}"
    if not m.ci_defined:
        return f"{mean} ± n/a"
    return f"{mean} ± {m.ci95_halfwidth:.{decimals}f}"


def _csv_text(rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


def aligned_text(rows: list[list]) -> str:
    cells = [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells if i < len(r)) for i in range(max(len(r) for r in cells))]
    lines = []
    for r in cells:
        lines.append("  ".join(c.ljust(widths[i]) for i, c in enumerate(r)).rstrip())
    return "\n".join(lines) + "\n"


# --- duration histogram (utterance count + hours per duration range) --------


def histogram_rows(hist: DurationHistogram) -> list[list]:
    rows = [["seconds_range", "utterances", "duration_hours"]]
    for b in hist.buckets:
        rows.append([b.label, b.count, f"{b.hours:.2f}"])
    rows.append(["Total", hist.total_count, f"{hist.total_hours:.2f}"])
    return rows


def histogram_csv(hist: DurationHistogram) -> str:
    return _csv_text(histogram_rows(hist))


def histogram_text(hist: DurationHistogram) -> str:
    return aligned_text(histogram_rows(hist))


# --- corpus summary (speakers / hours / utterances / extremes) --------------


def corpus_summary(m: CorpusManifest) -> dict:
    report = speaker_stats(m)
    n_speakers = len(report.stats)
    mean_minutes = (m.total_duration_s / 60.0 / n_speakers) if n_speakers else 0.0
    most = report.most
    least = report.least
    return {
        "name": m.name,
        "speakers": n_speakers,
        "duration_hours": m.total_hours,
        "utterances": len(m),
        "mean_minutes_per_speaker": mean_minutes,
        "speaker_most_data": f"{most.speaker_id} ({most.total_minutes:.2f} mins)" if most else "",
        "speaker_least_data": f"{least.speaker_id} ({least.total_minutes * 60:.1f} secs)" if least else "",
    }


def summary_rows(summaries: list[dict]) -> list[list]:
    rows = [["metric"] + [s["name"] for s in summaries]]
    rows.append(["Speakers"] + [s["speakers"] for s in summaries])
    rows.append(["Duration (in hrs)"] + [f"{s['duration_hours']:.2f}" for s in summaries])
    rows.append(["# of utterances"] + [s["utterances"] for s in summaries])
    rows.append(["Mean duration per speaker"] + [f"{s['mean_minutes_per_speaker']:.2f} mins" for s in summaries])
    rows.append(["Speaker with most data"] + [s["speaker_most_data"] for s in summaries])
    rows.append(["Speaker with least data"] + [s["speaker_least_data"] for s in summaries])
    return rows


def summary_csv(summaries: list[dict]) -> str:
    return _csv_text(summary_rows(summaries))


def summary_text(summaries: list[dict]) -> str:
    return aligned_text(summary_rows(summaries))


# --- MOS tables --------------------------------------------------------------


def mos_table_csv(results: list[tuple[str, MosResult]]) -> str:
    """Two-column category/MOS table (phase-1 style)."""
    rows = [["category", "mos"]]
    for name, res in results:
        rows.append([name, format_mos(res)])
    return _csv_text(rows)


def phase2_table_csv(
    group_rows: list[tuple[str, dict[str, MosResult]]],
    overall: dict[str, MosResult],
    vc_overall: MosResult | None,
) -> str:
    """Per-group category means with a pooled overall row (phase-2 style)."""
    codes = ["SI", "VN", "SP", "MP", "EP"]
    rows = [["group"] + codes + ["VC"]]
    for group_id, by_cat in group_rows:
        rows.append(
            [group_id]
            + [f"{by_cat[c].mean:.2f}" if c in by_cat else "" for c in codes]
            + [""]
        )
    rows.append(
        ["Overall MOS"]
        + [format_mos(overall[c]) if c in overall else "" for c in codes]
        + [format_mos(vc_overall) if vc_overall else ""]
    )
    return _csv_text(rows)


def natural_vs_synthetic_csv(
    natural: dict[str, MosResult],
    synthetic: dict[str, MosResult],
    natural_vc: MosResult | None = None,
    synthetic_vc: MosResult | None = None,
) -> str:
    codes = ["SI", "VN", "SP", "MP", "EP"]
    rows = [["arm"] + codes + ["VC"]]
    for label, by_cat, vc in (
        ("Natural Speech MOS", natural, natural_vc),
        ("Synthetic Speech MOS", synthetic, synthetic_vc),
    ):
        rows.append(
            [label]
            + [format_mos(by_cat[c]) if c in by_cat else "" for c in codes]
            + [format_mos(vc) if vc else ""]
        )
    return _csv_text(rows)


# --- paired score-set comparison ---------------------------------------------


def comparison_csv(report: ComparisonReport) -> str:
    rows = [
        ["samples", f"{report.label_a} MOS", f"{report.label_b} MOS", "difference"],
        [
            report.mos_a.n,
            format_mos(report.mos_a),
            format_mos(report.mos_b),
            f"{report.difference:.2f}",
        ],
    ]
    return _csv_text(rows)


def comparison_from_summary(
    label_a: str,
    mean_a: float,
    hw_a: float,
    label_b: str,
    mean_b: float,
    hw_b: float,
    n: int,
) -> ComparisonReport:
    """Build a comparison from pre-computed summary numbers (no raw scores)."""
    return ComparisonReport(
        label_a=label_a,
        label_b=label_b,
        mos_a=MosResult(category="MOS", mean=mean_a, ci95_halfwidth=hw_a, n=n),
        mos_b=MosResult(category="MOS", mean=mean_b, ci95_halfwidth=hw_b, n=n),
    )


# --- WER table ----------------------------------------------------------------


def wer_table_csv(rows_in: list[tuple[str, int, float]]) -> str:
    """rows_in: (data-type label, utterance count, WER scaled by 100)."""
    rows = [["data_type", "utterances", "wer"]]
    for label, n, w in rows_in:
        rows.append([label, n, f"{w:.2f}"])
    return _csv_text(rows)


# --- similarity matrix ----------------------------------------------------------


def similarity_csv(matrix: SimilarityMatrix, decimals: int = 4) -> str:
    rows = [[""] + list(matrix.col_labels)]
    for i, label in enumerate(matrix.row_labels):
        rows.append([label] + [f"{matrix.values[i, j]:.{decimals}f}" for j in range(len(matrix.col_labels))])
    return _csv_text(rows)
