"""Corpus preparation and evaluation toolkit for child TTS research."""

from .corpus import (
    CorpusManifest,
    SubsetRules,
    Transcript,
    Utterance,
    build_subset,
    bucket_durations,
    classify_utterance,
    load_manifest,
    parse_transcript,
    save_manifest,
    scan_corpus,
    speaker_stats,
)
from .audio import AudioBuffer, VadConfig, convert_pcm, detect_voiced, read_wav, trim_silence, write_wav
from .features import MelConfig, MelSpectrogram, log_mel
from .textnorm import NormConfig, normalize_text
from .embed import (
    SpeakerEmbedding,
    aggregate_embedding,
    baseline_embed,
    compute_eer,
    cosine_similarity,
    cross_similarity,
    plan_inference_windows,
    plan_training_partials,
    project_2d,
)
from .metrics import Rating, aggregate_mos, compare_score_sets, corpus_wer, overall_consistency, select_eval_speakers, wer
from .pipeline import PipelineConfig, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer",
    "CorpusManifest",
    "MelConfig",
    "MelSpectrogram",
    "NormConfig",
    "PipelineConfig",
    "Rating",
    "SpeakerEmbedding",
    "SubsetRules",
    "Transcript",
    "Utterance",
    "VadConfig",
    "aggregate_embedding",
    "aggregate_mos",
    "baseline_embed",
    "bucket_durations",
    "build_subset",
    "classify_utterance",
    "compare_score_sets",
    "compute_eer",
    "convert_pcm",
    "corpus_wer",
    "cosine_similarity",
    "cross_similarity",
    "detect_voiced",
    "load_manifest",
    "log_mel",
    "normalize_text",
    "overall_consistency",
    "parse_transcript",
    "plan_inference_windows",
    "plan_training_partials",
    "project_2d",
    "read_wav",
    "run_pipeline",
    "save_manifest",
    "scan_corpus",
    "select_eval_speakers",
    "speaker_stats",
    "trim_silence",
    "wer",
    "write_wav",
]
