"""Corpus model: transcript parsing, usability triage, subset building, stats.

A corpus is a flat list of utterances (audio path + transcript + duration).
Triage applies configurable rules (duration window, annotation tags) and
produces a per-utterance verdict; the subset keeps only usable utterances.
"""

from __future__ import annotations

import json
import re
from bisect import bisect_right
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import CorpusError

# Reject reasons (fixed vocabulary)
NOISE_ONLY = "noise_only"
INDISCERNIBLE = "indiscernible"
NO_PHONETIC_CONTENT = "no_phonetic_content"
TOO_SHORT = "too_short"
TOO_LONG = "too_long"
MISSING_TRANSCRIPT = "missing_transcript"

REJECT_REASONS = {
    NOISE_ONLY,
    INDISCERNIBLE,
    NO_PHONETIC_CONTENT,
    TOO_SHORT,
    TOO_LONG,
    MISSING_TRANSCRIPT,
}


@dataclass(frozen=True)
class TagRule:
    """One annotation-tag pattern.

    `kind` is the tag label recorded in Transcript.tags. If None, the regex
    must define a named group `kind` whose text becomes the label.
    """

    pattern: str
    kind: str | None = None

    def compiled(self) -> re.Pattern:
        return re.compile(self.pattern)


# Default taxonomy: any <word> annotation is stripped and recorded under its
# own name (noise, breath, indiscernible, ...); "(())" marks unparseable
# speech; a trailing-hyphen token is a partial word (stripped, non-rejecting).
DEFAULT_TAG_RULES = (
    TagRule(r"<(?P<kind>[A-Za-z_]+)>"),
    TagRule(r"\(\(\)\)", kind="unparseable"),
    TagRule(r"(?<!\S)[\w']+-(?=\s|$)", kind="partial_word"),
)

# Tag kinds that never count as noise content on their own
_NON_NOISE_KINDS = {"unparseable", "partial_word"}


@dataclass(frozen=True)
class Transcript:
    raw_text: str
    clean_text: str
    tags: tuple[str, ...]

    @property
    def token_count(self) -> int:
        return len(self.clean_text.split())


@dataclass(frozen=True)
class UsabilityVerdict:
    reject_reasons: frozenset[str]

    @property
    def usable(self) -> bool:
        return not self.reject_reasons


@dataclass(frozen=True)
class Utterance:
    id: str
    speaker_id: str
    audio_path: str
    duration_s: float
    transcript: Transcript | None = None
    verdict: UsabilityVerdict | None = None


@dataclass(frozen=True)
class SubsetRules:
    """Triage rules. Duration bounds are inclusive: [min_s, max_s] is kept."""

    min_duration_s: float = 10.0
    max_duration_s: float = 15.0
    tag_rules: tuple[TagRule, ...] = DEFAULT_TAG_RULES
    exclude_ids: frozenset[str] = frozenset()


@dataclass
class CorpusManifest:
    name: str
    utterances: list[Utterance] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.utterances)

    @property
    def speaker_ids(self) -> set[str]:
        return {u.speaker_id for u in self.utterances}

    @property
    def total_duration_s(self) -> float:
        return sum(u.duration_s for u in self.utterances)

    @property
    def total_hours(self) -> float:
        return self.total_duration_s / 3600.0


@dataclass(frozen=True)
class DurationBucket:
    lower_s: float
    upper_s: float | None  # None = open-ended
    count: int
    hours: float

    @property
    def label(self) -> str:
        if self.upper_s is None:
            return f"{_fmt_edge(self.lower_s)}+"
        return f"{_fmt_edge(self.lower_s)}-{_fmt_edge(self.upper_s)}"


def _fmt_edge(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:g}"


@dataclass(frozen=True)
class DurationHistogram:
    buckets: tuple[DurationBucket, ...]

    @property
    def total_count(self) -> int:
        return sum(b.count for b in self.buckets)

    @property
    def total_hours(self) -> float:
        return sum(b.hours for b in self.buckets)


@dataclass(frozen=True)
class SpeakerStats:
    speaker_id: str
    total_minutes: float
    utterance_count: int
    mean_utterance_s: float


@dataclass(frozen=True)
class SpeakerStatsReport:
    stats: tuple[SpeakerStats, ...]  # sorted by minutes desc, id asc
    most: SpeakerStats | None
    least: SpeakerStats | None


def parse_transcript(raw: str, tag_rules: tuple[TagRule, ...] = DEFAULT_TAG_RULES) -> Transcript:
    """Extract annotation tags and return the tag-free, whitespace-collapsed text."""
    tags: list[str] = []
    text = raw

    for rule in tag_rules:
        rx = rule.compiled()

        def _record(m: re.Match) -> str:
            kind = rule.kind if rule.kind is not None else m.group("kind").lower()
            tags.append(kind)
            return " "

        text = rx.sub(_record, text)

    clean = " ".join(text.split())
    return Transcript(raw_text=raw, clean_text=clean, tags=tuple(tags))


def classify_utterance(u: Utterance, rules: SubsetRules) -> UsabilityVerdict:
    """Pure triage of one utterance against the rules; reasons accumulate.

    The transcript is re-parsed with the rules' tag taxonomy, so the verdict
    depends only on (raw text, duration, rules) regardless of how the
    utterance was originally scanned.
    """
    reasons: set[str] = set()

    if u.transcript is None:
        reasons.add(MISSING_TRANSCRIPT)
    else:
        t = parse_transcript(u.transcript.raw_text, rules.tag_rules)
        if INDISCERNIBLE in t.tags:
            reasons.add(INDISCERNIBLE)
        if not t.clean_text:
            noisy = any(k not in _NON_NOISE_KINDS for k in t.tags)
            reasons.add(NOISE_ONLY if noisy else NO_PHONETIC_CONTENT)

    if u.duration_s < rules.min_duration_s:
        reasons.add(TOO_SHORT)
    elif u.duration_s > rules.max_duration_s:
        reasons.add(TOO_LONG)

    return UsabilityVerdict(reject_reasons=frozenset(reasons))


def classify_manifest(m: CorpusManifest, rules: SubsetRules) -> CorpusManifest:
    """Return a copy of the manifest with verdicts attached to every utterance."""
    out = [replace(u, verdict=classify_utterance(u, rules)) for u in m.utterances]
    return CorpusManifest(name=m.name, utterances=out)


def build_subset(m: CorpusManifest, rules: SubsetRules, name: str | None = None) -> CorpusManifest:
    """Keep exactly the usable utterances (order preserved).

    Utterance ids listed in rules.exclude_ids model the manual removal pass
    and are dropped even when the automatic verdict is usable.
    """
    classified = classify_manifest(m, rules)
    kept = [
        u
        for u in classified.utterances
        if u.verdict is not None and u.verdict.usable and u.id not in rules.exclude_ids
    ]
    return CorpusManifest(name=name if name is not None else m.name, utterances=kept)


def bucket_durations(m: CorpusManifest, edges: list[float]) -> DurationHistogram:
    """Histogram utterances into [lower, upper) buckets; last bucket is open."""
    if not edges or any(b <= a for a, b in zip(edges, edges[1:])):
        raise CorpusError("invalid_edges", "edges must be non-empty and strictly increasing")

    n_buckets = len(edges)  # len(edges)-1 finite buckets + 1 open-ended
    counts = [0] * n_buckets
    seconds = [0.0] * n_buckets
    for u in m.utterances:
        idx = bisect_right(edges, u.duration_s) - 1
        idx = max(0, min(idx, n_buckets - 1))
        counts[idx] += 1
        seconds[idx] += u.duration_s

    buckets = []
    for i in range(n_buckets):
        upper = edges[i + 1] if i + 1 < len(edges) else None
        buckets.append(
            DurationBucket(lower_s=edges[i], upper_s=upper, count=counts[i], hours=seconds[i] / 3600.0)
        )
    return DurationHistogram(buckets=tuple(buckets))


# Duration ranges used throughout the corpus comparison tables
TABLE_EDGES_S = [0.0, 5.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0]


def speaker_stats(m: CorpusManifest) -> SpeakerStatsReport:
    """Per-speaker totals plus the most/least-data extremes.

    Stats are ordered by total minutes descending; ties break on the
    lexicographically smaller speaker id (for extremes too).
    """
    totals: dict[str, list[float]] = {}
    for u in m.utterances:
        acc = totals.setdefault(u.speaker_id, [0.0, 0])
        acc[0] += u.duration_s
        acc[1] += 1

    stats = [
        SpeakerStats(
            speaker_id=sid,
            total_minutes=dur / 60.0,
            utterance_count=int(n),
            mean_utterance_s=dur / n if n else 0.0,
        )
        for sid, (dur, n) in totals.items()
    ]
    stats.sort(key=lambda s: (-s.total_minutes, s.speaker_id))

    most = stats[0] if stats else None
    least = min(stats, key=lambda s: (s.total_minutes, s.speaker_id)) if stats else None
    return SpeakerStatsReport(stats=tuple(stats), most=most, least=least)


# ---------------------------------------------------------------------------
# Manifest file IO: one JSON record per line with keys
#   id, speaker_id, audio_path, duration_s, transcript_raw, verdict
# verdict is null or {"usable": bool, "reject_reasons": [str, ...]}


def _utterance_to_record(u: Utterance) -> dict:
    verdict = None
    if u.verdict is not None:
        verdict = {
            "usable": u.verdict.usable,
            "reject_reasons": sorted(u.verdict.reject_reasons),
        }
    return {
        "id": u.id,
        "speaker_id": u.speaker_id,
        "audio_path": u.audio_path,
        "duration_s": u.duration_s,
        "transcript_raw": u.transcript.raw_text if u.transcript is not None else None,
        "verdict": verdict,
    }


def _utterance_from_record(rec: dict, tag_rules: tuple[TagRule, ...]) -> Utterance:
    raw = rec.get("transcript_raw")
    verdict = None
    if rec.get("verdict") is not None:
        verdict = UsabilityVerdict(reject_reasons=frozenset(rec["verdict"]["reject_reasons"]))
    return Utterance(
        id=rec["id"],
        speaker_id=rec["speaker_id"],
        audio_path=rec["audio_path"],
        duration_s=float(rec["duration_s"]),
        transcript=parse_transcript(raw, tag_rules) if raw is not None else None,
        verdict=verdict,
    )


def save_manifest(m: CorpusManifest, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for u in m.utterances:
            f.write(json.dumps(_utterance_to_record(u), ensure_ascii=False, sort_keys=True))
            f.write("\n")


def load_manifest(
    path: str | Path,
    name: str | None = None,
    tag_rules: tuple[TagRule, ...] = DEFAULT_TAG_RULES,
) -> CorpusManifest:
    utterances = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            utterances.append(_utterance_from_record(json.loads(line), tag_rules))
    ids = [u.id for u in utterances]
    if len(set(ids)) != len(ids):
        raise CorpusError("duplicate_id", "utterance ids must be unique within a manifest")
    return CorpusManifest(name=name or Path(path).stem, utterances=utterances)


def scan_corpus(
    root: str | Path,
    name: str | None = None,
    tag_rules: tuple[TagRule, ...] = DEFAULT_TAG_RULES,
) -> CorpusManifest:
    """Walk `root` for WAV files with sibling .trn/.txt transcripts.

    The utterance id is the file stem (the relative path when stems collide),
    the speaker id the parent directory name. Transcript files hold one UTF-8
    line of raw text.
    """
    from .audio import wav_duration_s

    root = Path(root)
    wavs = sorted(root.rglob("*.wav"))
    stem_counts: dict[str, int] = {}
    for wav in wavs:
        stem_counts[wav.stem] = stem_counts.get(wav.stem, 0) + 1

    utterances = []
    for wav in wavs:
        transcript = None
        for ext in (".trn", ".txt"):
            cand = wav.with_suffix(ext)
            if cand.exists():
                raw = cand.read_text(encoding="utf-8").strip()
                transcript = parse_transcript(raw, tag_rules)
                break
        if stem_counts[wav.stem] > 1:
            uid = wav.relative_to(root).with_suffix("").as_posix()
        else:
            uid = wav.stem
        utterances.append(
            Utterance(
                id=uid,
                speaker_id=wav.parent.name,
                audio_path=str(wav),
                duration_s=wav_duration_s(wav),
                transcript=transcript,
            )
        )
    return CorpusManifest(name=name or root.name, utterances=utterances)


def load_exclusion_list(path: str | Path) -> frozenset[str]:
    """One utterance id per line; '#' starts a comment."""
    ids = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            ids.add(line)
    return frozenset(ids)
