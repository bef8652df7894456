"""Shared fixtures: the 20-utterance triage corpus and WAV helpers."""

from __future__ import annotations

import numpy as np
import pytest

from ttskit.audio import AudioBuffer, encode_wav
from ttskit.corpus import CorpusManifest, Utterance, parse_transcript

# (id, speaker, duration_s, raw transcript or None)
FIXTURE_ROWS = [
    ("u01", "spkA", 12.0, "the plant needs soil"),
    ("u02", "spkA", 3.0, "<noise>"),
    ("u03", "spkA", 11.0, "in oxygen right <indiscernible>"),
    ("u04", "spkB", 10.0, "it's glowing <breath>"),
    ("u05", "spkB", 15.0, "we planted seeds yesterday"),
    ("u06", "spkB", 15.5, "the roots keep growing and growing all week"),
    ("u07", "spkC", 12.5, "(()) (()) (())"),
    ("u08", "spkC", 11.2, "um we measured a kolome- a kilometer"),
    ("u09", "spkC", 9.99, "energy <noise>"),
    ("u10", "spkC", 14.0, None),
    ("u11", "spkD", 10.5, "the mixture turned green"),
    ("u12", "spkD", 13.7, "it needs water and sunlight"),
    ("u13", "spkD", 12.2, "rocks are heavier than leaves"),
    ("u14", "spkD", 200.0, "it's trying to show us all the things the plant needs"),
    ("u15", "spkE", 11.9, "the magnet pulls the nail"),
    ("u16", "spkE", 14.9, "sound travels through the air"),
    ("u17", "spkE", 10.0, "plants make their own food"),
    ("u18", "spkF", 13.3, "the ice melted in the sun"),
    ("u19", "spkF", 12.8, "we used a ruler to measure"),
    ("u20", "spkF", 11.1, "the battery powers the bulb"),
]

# Hand-derived oracle (default rules: keep [10, 15] s, reject noise-only /
# indiscernible / unparseable-only / missing transcripts):
#   u02 noise_only+too_short, u03 indiscernible, u06 too_long,
#   u07 no_phonetic_content, u09 too_short, u10 missing_transcript,
#   u14 too_long -> 7 rejected, 13 kept.
USABLE_IDS = [
    "u01", "u04", "u05", "u08", "u11", "u12", "u13",
    "u15", "u16", "u17", "u18", "u19", "u20",
]
REJECTED_REASONS = {
    "u02": {"noise_only", "too_short"},
    "u03": {"indiscernible"},
    "u06": {"too_long"},
    "u07": {"no_phonetic_content"},
    "u09": {"too_short"},
    "u10": {"missing_transcript"},
    "u14": {"too_long"},
}


def make_fixture_manifest() -> CorpusManifest:
    utterances = [
        Utterance(
            id=uid,
            speaker_id=spk,
            audio_path=f"/fixture/{spk}/{uid}.wav",
            duration_s=dur,
            transcript=parse_transcript(raw) if raw is not None else None,
        )
        for uid, spk, dur, raw in FIXTURE_ROWS
    ]
    return CorpusManifest(name="fixture20", utterances=utterances)


@pytest.fixture
def fixture_manifest() -> CorpusManifest:
    return make_fixture_manifest()


def tone(duration_s: float, rate: int = 8000, freq: float = 440.0, amp: float = 0.5) -> AudioBuffer:
    t = np.arange(int(round(duration_s * rate))) / rate
    return AudioBuffer(samples=amp * np.sin(2 * np.pi * freq * t), sample_rate_hz=rate)


def write_fixture_corpus(root, rate: int = 8000, rows=FIXTURE_ROWS) -> None:
    """Materialize the fixture as WAV + .trn files (speaker subdirectories)."""
    for uid, spk, dur, raw in rows:
        spk_dir = root / spk
        spk_dir.mkdir(parents=True, exist_ok=True)
        buf = tone(dur, rate=rate, freq=200.0 + 10 * int(uid[1:]))
        (spk_dir / f"{uid}.wav").write_bytes(encode_wav(buf))
        if raw is not None:
            (spk_dir / f"{uid}.trn").write_text(raw + "\n", "utf-8")
