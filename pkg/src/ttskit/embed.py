"""Utterance-level speaker embeddings: window planning, aggregation, a
deterministic baseline embedder, cosine/EER scoring, and 2-D projection.

The neural encoder itself is pluggable: embeddings either come from an
external file (256-dim vectors per utterance) or from the bundled
deterministic baseline, and everything downstream is agnostic to the source.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmbedError
from .features import MelSpectrogram

EMBED_DIM = 256
_EPS = 1e-9


@dataclass
class SpeakerEmbedding:
    vector: np.ndarray  # unit L2 norm
    speaker_id: str = ""
    utterance_id: str = ""
    source: str = "baseline"  # or "external"


@dataclass(frozen=True)
class WindowPlan:
    windows: tuple[tuple[float, float], ...]
    window_s: float
    hop_s: float
    padded: bool = False  # True when the utterance was shorter than one window

    def __len__(self) -> int:
        return len(self.windows)


@dataclass
class SimilarityMatrix:
    row_labels: list[str]
    col_labels: list[str]
    values: np.ndarray  # (rows, cols) cosine similarities


@dataclass
class EerResult:
    eer: float
    threshold: float
    far_curve: tuple[tuple[float, float], ...]  # (threshold, FAR)
    frr_curve: tuple[tuple[float, float], ...]


def plan_training_partials(duration_s: float, partial_s: float = 1.6) -> WindowPlan:
    """Non-overlapping fixed windows from 0; an end-aligned extra window
    covers the tail when at least half a window remains. Short utterances
    get one zero-padded window."""
    if duration_s <= 0:
        raise EmbedError("empty_audio", f"duration must be positive, got {duration_s}")
    if duration_s < partial_s - _EPS:
        return WindowPlan(windows=((0.0, partial_s),), window_s=partial_s, hop_s=partial_s, padded=True)

    n_full = int(np.floor(duration_s / partial_s + _EPS))
    windows = [(i * partial_s, (i + 1) * partial_s) for i in range(n_full)]
    remainder = duration_s - n_full * partial_s
    if remainder >= partial_s / 2.0 - _EPS and remainder > _EPS:
        windows.append((duration_s - partial_s, duration_s))
    return WindowPlan(windows=tuple(windows), window_s=partial_s, hop_s=partial_s)


def plan_inference_windows(
    duration_s: float, window_s: float = 0.8, overlap: float = 0.5
) -> WindowPlan:
    """Overlapped sliding windows from 0 plus an end-aligned window whenever
    the tail would otherwise be uncovered."""
    if duration_s <= 0:
        raise EmbedError("empty_audio", f"duration must be positive, got {duration_s}")
    if not 0.0 <= overlap < 1.0:
        raise EmbedError("bad_overlap", f"overlap must be in [0, 1), got {overlap}")
    hop = window_s * (1.0 - overlap)
    if duration_s < window_s - _EPS:
        return WindowPlan(windows=((0.0, window_s),), window_s=window_s, hop_s=hop, padded=True)

    windows = []
    i = 0
    while i * hop + window_s <= duration_s + _EPS:
        windows.append((i * hop, i * hop + window_s))
        i += 1
    if windows[-1][1] < duration_s - _EPS:
        windows.append((duration_s - window_s, duration_s))
    return WindowPlan(windows=tuple(windows), window_s=window_s, hop_s=hop)


def aggregate_embedding(
    partials: list[np.ndarray], speaker_id: str = "", utterance_id: str = "", source: str = "baseline"
) -> SpeakerEmbedding:
    """Arithmetic mean of the window embeddings, L2-normalized."""
    if not partials:
        raise EmbedError("no_partials", "need at least one partial embedding")
    mat = np.asarray(partials, dtype=np.float64)
    if mat.ndim != 2:
        raise EmbedError("dimension_mismatch", "partials must share one dimension")
    mean = mat.mean(axis=0)
    norm = float(np.linalg.norm(mean))
    if norm < 1e-12:
        raise EmbedError("degenerate_embedding", "mean of partials has zero norm")
    return SpeakerEmbedding(
        vector=mean / norm, speaker_id=speaker_id, utterance_id=utterance_id, source=source
    )


def baseline_embed(mel: MelSpectrogram, speaker_id: str = "", utterance_id: str = "") -> SpeakerEmbedding:
    """Deterministic stand-in for a neural encoder.

    Per-channel mean, per-channel standard deviation, and per-channel mean
    absolute frame delta, concatenated and zero-padded to EMBED_DIM, then
    L2-normalized.
    """
    frames = np.asarray(mel.frames, dtype=np.float64)
    if frames.shape[0] < 2:
        raise EmbedError("too_short", "need at least 2 frames")
    n_mels = frames.shape[1]
    if 3 * n_mels > EMBED_DIM:
        raise EmbedError("bad_mel_dim", f"{n_mels} mel channels exceed the embedding capacity")

    mean = frames.mean(axis=0)
    std = frames.std(axis=0)
    delta = np.abs(np.diff(frames, axis=0)).mean(axis=0)
    vec = np.zeros(EMBED_DIM)
    vec[: 3 * n_mels] = np.concatenate([mean, std, delta])
    norm = float(np.linalg.norm(vec))
    if norm < 1e-12:
        raise EmbedError("degenerate_embedding", "all-zero feature vector")
    return SpeakerEmbedding(
        vector=vec / norm, speaker_id=speaker_id, utterance_id=utterance_id, source="baseline"
    )


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na < 1e-12 or nb < 1e-12:
        raise EmbedError("zero_vector", "cosine similarity undefined for zero vectors")
    return float(np.dot(a, b) / (na * nb))


def _speaker_means(groups: dict[str, list]) -> dict[str, np.ndarray]:
    means = {}
    for speaker, embs in groups.items():
        if not embs:
            raise EmbedError("no_partials", f"speaker {speaker} has no embeddings")
        vectors = [e.vector if isinstance(e, SpeakerEmbedding) else np.asarray(e) for e in embs]
        means[speaker] = aggregate_embedding(vectors).vector
    return means


def cross_similarity(set_a: dict[str, list], set_b: dict[str, list]) -> SimilarityMatrix:
    """Cosine similarities between per-speaker mean embeddings of two sets."""
    means_a = _speaker_means(set_a)
    means_b = _speaker_means(set_b)
    rows = sorted(means_a)
    cols = sorted(means_b)
    values = np.zeros((len(rows), len(cols)))
    for i, ra in enumerate(rows):
        for j, cb in enumerate(cols):
            values[i, j] = cosine_similarity(means_a[ra], means_b[cb])
    return SimilarityMatrix(row_labels=rows, col_labels=cols, values=values)


def compute_eer(genuine_scores, impostor_scores) -> EerResult:
    """Equal error rate from explicit genuine/impostor score lists.

    Thresholds sweep the sorted union of scores (FRR = fraction of genuine
    below t, FAR = fraction of impostors at/above t); when FAR and FRR cross
    between adjacent thresholds the curves are interpolated linearly.
    """
    g = np.sort(np.asarray(list(genuine_scores), dtype=np.float64))
    imp = np.sort(np.asarray(list(impostor_scores), dtype=np.float64))
    if len(g) == 0 or len(imp) == 0:
        raise EmbedError("insufficient_scores", "both score lists must be non-empty")

    thresholds = np.unique(np.concatenate([g, imp]))
    frr = np.searchsorted(g, thresholds, side="left") / len(g)
    far = 1.0 - np.searchsorted(imp, thresholds, side="left") / len(imp)

    # sentinel beyond the max score: everything rejected
    thresholds = np.append(thresholds, thresholds[-1] + 1.0)
    frr = np.append(frr, 1.0)
    far = np.append(far, 0.0)

    diff = far - frr  # non-increasing, starts at +1, ends at -1
    eer = threshold = None
    for k in range(len(diff)):
        if diff[k] == 0.0:
            eer, threshold = float(far[k]), float(thresholds[k])
            break
        if diff[k] < 0.0:
            alpha = diff[k - 1] / (diff[k - 1] - diff[k])
            eer = float(frr[k - 1] + alpha * (frr[k] - frr[k - 1]))
            threshold = float(thresholds[k - 1] + alpha * (thresholds[k] - thresholds[k - 1]))
            break
    assert eer is not None  # diff always reaches -1 at the sentinel

    curve_t = thresholds.tolist()
    return EerResult(
        eer=eer,
        threshold=threshold,
        far_curve=tuple(zip(curve_t, far.tolist())),
        frr_curve=tuple(zip(curve_t, frr.tolist())),
    )


def project_2d(embeddings: list, seed: int = 0, tol: float = 1e-9, max_iter: int = 1000) -> list[tuple[float, float]]:
    """Centered projection onto the top-2 principal axes.

    Axes come from power iteration with deflation; the sign convention
    (largest-magnitude component positive) and the seeded start vector make
    the output deterministic. Identical inputs map every point to the origin.
    """
    if len(embeddings) < 2:
        raise EmbedError("insufficient_points", "need at least 2 embeddings")
    vectors = [e.vector if isinstance(e, SpeakerEmbedding) else np.asarray(e, dtype=np.float64) for e in embeddings]
    x = np.asarray(vectors, dtype=np.float64)
    xc = x - x.mean(axis=0)
    if float(np.abs(xc).max(initial=0.0)) == 0.0:
        return [(0.0, 0.0)] * len(embeddings)

    cov = xc.T @ xc
    rng = np.random.default_rng(seed)
    axes = []
    for _ in range(2):
        v = rng.standard_normal(cov.shape[0])
        v /= np.linalg.norm(v)
        ok = False
        for _ in range(max_iter):
            w = cov @ v
            nw = float(np.linalg.norm(w))
            if nw < 1e-12:
                break
            w /= nw
            if min(np.linalg.norm(w - v), np.linalg.norm(w + v)) < tol:
                v = w
                ok = True
                break
            v = w
        if not ok and float(np.linalg.norm(cov @ v)) < 1e-12:
            axes.append(None)  # no variance left along any direction
            continue
        peak = int(np.argmax(np.abs(v)))
        if v[peak] < 0:
            v = -v
        axes.append(v)
        lam = float(v @ cov @ v)
        cov = cov - lam * np.outer(v, v)

    coords = []
    for row in xc:
        px = float(row @ axes[0]) if axes[0] is not None else 0.0
        py = float(row @ axes[1]) if axes[1] is not None else 0.0
        coords.append((px, py))
    return coords


# ---------------------------------------------------------------------------
# Embedding file: one record per line, '#' comments allowed:
#   utterance_id speaker_id v1 v2 ... v256


def write_embeddings(path: str | Path, embeddings: list[SpeakerEmbedding], comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as f:
        if comment:
            f.write(f"# {comment}\n")
        for e in embeddings:
            values = " ".join(f"{v:.10g}" for v in e.vector)
            f.write(f"{e.utterance_id} {e.speaker_id} {values}\n")


def read_embeddings(path: str | Path, expected_dim: int | None = EMBED_DIM) -> list[SpeakerEmbedding]:
    """Ingest externally computed embeddings; vectors are re-normalized."""
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 3:
            raise EmbedError("bad_embedding_file", f"line {lineno}: too few fields")
        utt, spk = parts[0], parts[1]
        vec = np.asarray([float(p) for p in parts[2:]], dtype=np.float64)
        if expected_dim is not None and len(vec) != expected_dim:
            raise EmbedError(
                "bad_embedding_file", f"line {lineno}: expected {expected_dim} dims, got {len(vec)}"
            )
        norm = float(np.linalg.norm(vec))
        if norm < 1e-12:
            raise EmbedError("degenerate_embedding", f"line {lineno}: zero vector")
        out.append(SpeakerEmbedding(vector=vec / norm, speaker_id=spk, utterance_id=utt, source="external"))
    return out


def group_by_speaker(embeddings: list[SpeakerEmbedding]) -> dict[str, list[SpeakerEmbedding]]:
    groups: dict[str, list[SpeakerEmbedding]] = {}
    for e in embeddings:
        groups.setdefault(e.speaker_id, []).append(e)
    return groups
