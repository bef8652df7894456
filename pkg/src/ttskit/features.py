"""Log-mel spectrogram extraction and the binary feature-file format."""

from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .audio import AudioBuffer
from .errors import AudioError

_MAGIC = b"MELF"
_VERSION = 1


@dataclass(frozen=True)
class MelConfig:
    n_mels: int = 40
    window_ms: float = 25.0
    hop_ms: float = 10.0
    fft_size: int = 512
    source_rate: int = 16000
    fmin_hz: float = 0.0
    fmax_hz: float | None = None  # default: Nyquist
    log_floor: float = 1e-10


@dataclass
class MelSpectrogram:
    frames: np.ndarray  # (n_frames, n_mels), natural-log mel energies
    config: MelConfig

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def n_mels(self) -> int:
        return self.frames.shape[1]


def _hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def _mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(cfg: MelConfig) -> np.ndarray:
    """Triangular filters with HTK-style mel spacing, shape (n_mels, n_bins)."""
    fmax = cfg.fmax_hz if cfg.fmax_hz is not None else cfg.source_rate / 2.0
    mel_pts = np.linspace(_hz_to_mel(cfg.fmin_hz), _hz_to_mel(fmax), cfg.n_mels + 2)
    hz_pts = _mel_to_hz(mel_pts)
    bin_freqs = np.fft.rfftfreq(cfg.fft_size, d=1.0 / cfg.source_rate)

    fb = np.zeros((cfg.n_mels, len(bin_freqs)))
    for m in range(cfg.n_mels):
        left, center, right = hz_pts[m], hz_pts[m + 1], hz_pts[m + 2]
        up = (bin_freqs - left) / max(center - left, 1e-12)
        down = (right - bin_freqs) / max(right - center, 1e-12)
        fb[m] = np.clip(np.minimum(up, down), 0.0, None)
    return fb


def log_mel(a: AudioBuffer, cfg: MelConfig | None = None) -> MelSpectrogram:
    """Magnitude-squared STFT -> mel filterbank -> natural log with floor.

    Frame count is 1 + floor((n_samples - window) / hop); no padding or
    centering, so the caller controls exact framing.
    """
    cfg = cfg or MelConfig()
    if a.sample_rate_hz != cfg.source_rate:
        raise AudioError(
            "rate_mismatch",
            f"buffer rate {a.sample_rate_hz} != analysis rate {cfg.source_rate}; resample first",
        )
    x = np.asarray(a.samples, dtype=np.float64)
    win = int(round(cfg.window_ms * cfg.source_rate / 1000.0))
    hop = int(round(cfg.hop_ms * cfg.source_rate / 1000.0))
    if len(x) < win:
        raise AudioError("too_short", f"need at least {win} samples, got {len(x)}")
    if cfg.fft_size < win:
        raise AudioError("bad_config", "fft_size smaller than the analysis window")

    frames = np.lib.stride_tricks.sliding_window_view(x, win)[::hop]
    windowed = frames * np.hanning(win)
    power = np.abs(np.fft.rfft(windowed, n=cfg.fft_size, axis=1)) ** 2
    mel = power @ mel_filterbank(cfg).T
    out = np.log(np.maximum(mel, cfg.log_floor))
    return MelSpectrogram(frames=out, config=cfg)


def expected_frame_count(n_samples: int, cfg: MelConfig) -> int:
    win = int(round(cfg.window_ms * cfg.source_rate / 1000.0))
    hop = int(round(cfg.hop_ms * cfg.source_rate / 1000.0))
    return 1 + (n_samples - win) // hop if n_samples >= win else 0


# Feature file: MAGIC, u16 version, u32 header length, JSON header
# {n_frames, n_mels, config, meta}, then row-major little-endian float32.


def write_features(path: str | Path, mel: MelSpectrogram, meta: dict | None = None) -> None:
    header = {
        "n_frames": mel.n_frames,
        "n_mels": mel.n_mels,
        "config": asdict(mel.config),
        "meta": meta or {},
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<HI", _VERSION, len(blob)))
        f.write(blob)
        f.write(mel.frames.astype("<f4").tobytes())


def read_features(path: str | Path) -> tuple[MelSpectrogram, dict]:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != _MAGIC:
            raise AudioError("bad_feature_file", f"bad magic in {path}")
        version, hlen = struct.unpack("<HI", f.read(6))
        if version != _VERSION:
            raise AudioError("bad_feature_file", f"unsupported version {version}")
        header = json.loads(f.read(hlen).decode("utf-8"))
        raw = header["config"]
        cfg = MelConfig(
            n_mels=raw["n_mels"],
            window_ms=raw["window_ms"],
            hop_ms=raw["hop_ms"],
            fft_size=raw["fft_size"],
            source_rate=raw["source_rate"],
            fmin_hz=raw["fmin_hz"],
            fmax_hz=raw["fmax_hz"],
            log_floor=raw["log_floor"],
        )
        data = np.frombuffer(f.read(), dtype="<f4").astype(np.float64)
    frames = data.reshape(header["n_frames"], header["n_mels"])
    return MelSpectrogram(frames=frames, config=cfg), header.get("meta", {})
