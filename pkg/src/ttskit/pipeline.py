"""End-to-end corpus preparation: scan -> triage -> subset -> audio prep ->
text normalization -> baseline speaker embeddings, with a summary report.

Every stage is deterministic given the config (all randomness is seeded), so
two runs over the same inputs produce byte-identical outputs. Input files
are never modified.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import corpus as cm
from . import reports
from .audio import VadConfig, convert_pcm, read_wav, trim_silence, write_wav
from .embed import baseline_embed, write_embeddings
from .errors import ToolkitError
from .features import MelConfig, log_mel
from .textnorm import NormConfig, load_abbreviations, normalize_text


class PipelineError(ToolkitError):
    def __init__(self, stage: str, file: str, cause: Exception):
        self.stage = stage
        self.file = file
        self.cause = cause
        super().__init__("pipeline_failed", f"stage={stage} file={file}: {cause}")


@dataclass
class PipelineConfig:
    corpus_root: str
    out_dir: str
    name: str | None = None
    min_duration_s: float = 10.0
    max_duration_s: float = 15.0
    exclude_file: str | None = None
    prep_rate_hz: int = 24000
    analysis_rate_hz: int = 16000
    prep_bits: int = 16
    trim: bool = False
    resample_taps: int = 64
    workers: int = 4  # file-level parallelism within the per-utterance stage
    seed: int = 0
    mel: MelConfig = field(default_factory=MelConfig)
    vad: VadConfig = field(default_factory=VadConfig)
    punctuation_policy: str = "strip"
    uppercase: bool = True
    abbreviation_file: str | None = None

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        raw = json.loads(Path(path).read_text("utf-8"))
        mel = MelConfig(**raw.pop("mel", {}))
        vad = VadConfig(**raw.pop("vad", {}))
        cfg = cls(mel=mel, vad=vad, **raw)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not Path(self.corpus_root).is_dir():
            raise ToolkitError("bad_config", f"corpus_root does not exist: {self.corpus_root}")
        for attr in ("exclude_file", "abbreviation_file"):
            value = getattr(self, attr)
            if value is not None and not Path(value).is_file():
                raise ToolkitError("bad_config", f"{attr} does not exist: {value}")

    def effective(self) -> dict:
        out = asdict(self)
        out["mel"] = asdict(self.mel)
        out["vad"] = asdict(self.vad)
        return out

    def subset_rules(self) -> cm.SubsetRules:
        exclude = cm.load_exclusion_list(self.exclude_file) if self.exclude_file else frozenset()
        return cm.SubsetRules(
            min_duration_s=self.min_duration_s,
            max_duration_s=self.max_duration_s,
            exclude_ids=exclude,
        )

    def norm_config(self) -> NormConfig:
        if self.abbreviation_file:
            table = load_abbreviations(self.abbreviation_file)
            return NormConfig(abbreviations=table, punctuation_policy=self.punctuation_policy, uppercase=self.uppercase)
        return NormConfig(punctuation_policy=self.punctuation_policy, uppercase=self.uppercase)


def run_pipeline(config: PipelineConfig) -> dict:
    """Run every stage; returns the summary dict (also written to out_dir)."""
    config.validate()
    out_dir = Path(config.out_dir)
    audio_dir = out_dir / "audio"
    text_dir = out_dir / "text"
    for d in (out_dir, audio_dir, text_dir):
        d.mkdir(parents=True, exist_ok=True)

    stage = "scan"
    try:
        manifest = cm.scan_corpus(config.corpus_root, name=config.name)
    except (ToolkitError, OSError) as e:
        raise PipelineError(stage, config.corpus_root, e) from e

    rules = config.subset_rules()
    classified = cm.classify_manifest(manifest, rules)
    subset = cm.build_subset(manifest, rules, name=f"{manifest.name}-subset")
    cm.save_manifest(classified, out_dir / "manifest_full.jsonl")
    cm.save_manifest(subset, out_dir / "manifest_subset.jsonl")

    norm_cfg = config.norm_config()

    def process(u):
        # per-utterance work; output files are keyed by id so workers never collide
        file_id = u.id.replace("/", "__")
        stage = "audio_prep"
        try:
            buf = read_wav(u.audio_path)
            if config.trim:
                buf = trim_silence(buf, config.vad)
            prepped = convert_pcm(buf, config.prep_rate_hz, config.prep_bits, taps=config.resample_taps)
            write_wav(audio_dir / f"{file_id}.wav", prepped)
        except (ToolkitError, OSError) as e:
            raise PipelineError(stage, u.audio_path, e) from e

        stage = "text_norm"
        try:
            normalized = normalize_text(u.transcript.clean_text, norm_cfg) if u.transcript else ""
            (text_dir / f"{file_id}.txt").write_text(normalized + "\n", "utf-8")
        except ToolkitError as e:
            raise PipelineError(stage, u.audio_path, e) from e

        stage = "embed"
        try:
            analysis = convert_pcm(buf, config.analysis_rate_hz, 16, taps=config.resample_taps)
            mel = log_mel(analysis, config.mel)
            return baseline_embed(mel, speaker_id=u.speaker_id, utterance_id=u.id)
        except ToolkitError as e:
            raise PipelineError(stage, u.audio_path, e) from e

    # executor.map keeps manifest order, so outputs stay byte-deterministic
    if config.workers > 1 and len(subset.utterances) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            embeddings = list(pool.map(process, subset.utterances))
    else:
        embeddings = [process(u) for u in subset.utterances]

    write_embeddings(out_dir / "embeddings.txt", embeddings, comment=f"seed={config.seed} baseline")

    full_summary = reports.corpus_summary(manifest)
    subset_summary = reports.corpus_summary(subset)
    summary = {
        "seed": config.seed,
        "config": config.effective(),
        "full": full_summary,
        "subset": subset_summary,
        "rejected": len(manifest) - len(subset),
        "outputs": {
            "manifest_full": str(out_dir / "manifest_full.jsonl"),
            "manifest_subset": str(out_dir / "manifest_subset.jsonl"),
            "audio_dir": str(audio_dir),
            "text_dir": str(text_dir),
            "embeddings": str(out_dir / "embeddings.txt"),
        },
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=1, sort_keys=True) + "\n", "utf-8")
    (out_dir / "summary.csv").write_text(reports.summary_csv([full_summary, subset_summary]), "utf-8")
    return summary
