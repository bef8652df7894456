"""Objective and subjective evaluation metrics: WER, MOS with 95% CI,
paired score-set comparison, and evaluation-speaker selection."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from .corpus import CorpusManifest, speaker_stats
from .errors import MetricError


@dataclass(frozen=True)
class WerReport:
    substitutions: int
    deletions: int
    insertions: int
    ref_len: int

    @property
    def edits(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def wer(self) -> float:
        return self.edits / max(1, self.ref_len)

    @property
    def wer_defined(self) -> bool:
        return self.ref_len > 0


def wer(ref: list[str], hyp: list[str]) -> WerReport:
    """Word-level Levenshtein alignment with unit costs.

    Among minimal-cost alignments the backtrace prefers fewer substitutions,
    then fewer deletions, so the (S, D, I) split is deterministic.
    """
    n, m = len(ref), len(hyp)
    # dp cell = (cost, subs, dels); lexicographic min implements the tie-break
    prev = [(j, 0, 0) for j in range(m + 1)]
    for i in range(1, n + 1):
        cur = [(prev[0][0] + 1, prev[0][1], prev[0][2] + 1)]
        ri = ref[i - 1]
        for j in range(1, m + 1):
            c, s, d = prev[j - 1]
            diag = (c, s, d) if ri == hyp[j - 1] else (c + 1, s + 1, d)
            c, s, d = prev[j]
            delete = (c + 1, s, d + 1)
            c, s, d = cur[j - 1]
            insert = (c + 1, s, d)
            cur.append(min(diag, delete, insert))
        prev = cur
    cost, subs, dels = prev[m]
    return WerReport(substitutions=subs, deletions=dels, insertions=cost - subs - dels, ref_len=n)


def corpus_wer(pairs: list[tuple[list[str], list[str]]]) -> WerReport:
    """Token-weighted corpus WER: total edits over total reference length."""
    subs = dels = ins = ref_len = 0
    for ref, hyp in pairs:
        r = wer(ref, hyp)
        subs += r.substitutions
        dels += r.deletions
        ins += r.insertions
        ref_len += r.ref_len
    return WerReport(substitutions=subs, deletions=dels, insertions=ins, ref_len=ref_len)


@dataclass(frozen=True)
class Rating:
    evaluator_id: str
    clip_id: str
    category: str  # rubric code: SI, VN, SP, MP, EP
    score: int  # 1..5
    timestamp: str = ""


@dataclass(frozen=True)
class MosResult:
    category: str
    mean: float
    ci95_halfwidth: float  # inf when undefined (n == 1)
    n: int
    approximate: bool = False  # CI derived from sub-interval averaging
    scores: tuple[int, ...] | None = None  # retained for pooling when known

    @property
    def ci_defined(self) -> bool:
        return math.isfinite(self.ci95_halfwidth)


def t_quantile_975(df: int) -> float:
    """Two-sided 95% t quantile; falls back to the normal value for huge df."""
    if df < 1:
        raise MetricError("bad_df", f"degrees of freedom must be >= 1, got {df}")
    if df > 200:
        return float(stats.norm.ppf(0.975))
    return float(stats.t.ppf(0.975, df))


def _mean_ci(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = float(np.mean(values))
    if n == 1:
        return mean, math.inf
    sd = float(np.std(values, ddof=1))
    return mean, t_quantile_975(n - 1) * sd / math.sqrt(n)


def aggregate_mos(ratings: list[Rating], category: str) -> MosResult:
    """Mean opinion score for one rubric category with a t-based 95% CI."""
    scores = [r.score for r in ratings if r.category == category]
    if not scores:
        raise MetricError("empty_category", f"no ratings for category {category}")
    for s in scores:
        if not 1 <= s <= 5:
            raise MetricError("bad_score", f"score {s} outside 1..5")
    mean, hw = _mean_ci([float(s) for s in scores])
    return MosResult(category=category, mean=mean, ci95_halfwidth=hw, n=len(scores), scores=tuple(scores))


def overall_consistency(sp: MosResult, mp: MosResult, ep: MosResult) -> MosResult:
    """Voice-consistency summary over the three phrase-position categories.

    The mean is the unweighted mean of the three sub-means. The CI pools the
    raw ratings when all three results carry them; otherwise it averages the
    sub-interval half-widths and is flagged approximate.
    """
    parts = (sp, mp, ep)
    mean = sum(p.mean for p in parts) / 3.0
    n = sum(p.n for p in parts)
    if all(p.scores is not None for p in parts):
        pooled = [float(s) for p in parts for s in p.scores]
        _, hw = _mean_ci(pooled)
        approximate = False
        scores = tuple(s for p in parts for s in p.scores)
    else:
        hws = [p.ci95_halfwidth for p in parts]
        hw = math.inf if any(math.isinf(h) for h in hws) else sum(hws) / 3.0
        approximate = True
        scores = None
    return MosResult(category="VC", mean=mean, ci95_halfwidth=hw, n=n, approximate=approximate, scores=scores)


@dataclass(frozen=True)
class ComparisonReport:
    label_a: str
    label_b: str
    mos_a: MosResult
    mos_b: MosResult

    @property
    def difference(self) -> float:
        return self.mos_a.mean - self.mos_b.mean


def compare_score_sets(
    a: list[float], b: list[float], label_a: str = "set_a", label_b: str = "set_b", category: str = "MOS"
) -> ComparisonReport:
    """Per-set mean +- CI95 and the difference of means (a minus b)."""
    if not a or not b:
        raise MetricError("empty_set", "both score sets must be non-empty")
    mean_a, hw_a = _mean_ci([float(x) for x in a])
    mean_b, hw_b = _mean_ci([float(x) for x in b])
    return ComparisonReport(
        label_a=label_a,
        label_b=label_b,
        mos_a=MosResult(category=category, mean=mean_a, ci95_halfwidth=hw_a, n=len(a)),
        mos_b=MosResult(category=category, mean=mean_b, ci95_halfwidth=hw_b, n=len(b)),
    )


@dataclass(frozen=True)
class SpeakerSelection:
    speaker_ids: tuple[str, ...]  # in draw order
    seed: int
    pool: tuple[str, ...]  # the top-k candidates, most minutes first


def select_eval_speakers(
    m: CorpusManifest, top_k: int = 20, n_select: int = 4, seed: int = 0
) -> SpeakerSelection:
    """Rank speakers by total minutes (tie: lexicographic id), keep the top_k,
    then sample n_select of them without replacement with the seeded RNG."""
    report = speaker_stats(m)
    if len(report.stats) < n_select:
        raise MetricError(
            "insufficient_speakers", f"need at least {n_select} speakers, found {len(report.stats)}"
        )
    pool = [s.speaker_id for s in report.stats[:top_k]]
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(pool), size=n_select, replace=False)
    return SpeakerSelection(
        speaker_ids=tuple(pool[i] for i in idx), seed=seed, pool=tuple(pool)
    )


# ---------------------------------------------------------------------------
# Ratings CSV: evaluator_id, clip_id, category, score, timestamp

RATINGS_HEADER = ["evaluator_id", "clip_id", "category", "score", "timestamp"]


def save_ratings_csv(path: str | Path, ratings: list[Rating]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(RATINGS_HEADER)
        for r in ratings:
            w.writerow([r.evaluator_id, r.clip_id, r.category, r.score, r.timestamp])


def load_ratings_csv(path: str | Path) -> list[Rating]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != RATINGS_HEADER:
            raise MetricError("bad_ratings_file", f"expected header {','.join(RATINGS_HEADER)}")
        for row in reader:
            out.append(
                Rating(
                    evaluator_id=row["evaluator_id"],
                    clip_id=row["clip_id"],
                    category=row["category"],
                    score=int(row["score"]),
                    timestamp=row["timestamp"],
                )
            )
    return out
