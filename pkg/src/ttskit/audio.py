"""Audio decode/encode, sample-rate conversion, and energy-based VAD.

All buffers hold normalized float samples in [-1, 1]. The WAV codec covers
RIFF PCM (8/16/24/32-bit integer, 32-bit float), mono or multichannel
(downmixed by channel averaging).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import AudioError

KAISER_BETA = 8.6  # ~80 dB stopband for the windowed-sinc resampler

_WAVE_FORMAT_PCM = 1
_WAVE_FORMAT_IEEE_FLOAT = 3
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE


@dataclass
class AudioBuffer:
    samples: np.ndarray  # float64, normalized to [-1, 1]
    sample_rate_hz: int
    bit_depth_origin: int = 16

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


@dataclass(frozen=True)
class VoicedSegment:
    start_s: float
    end_s: float


@dataclass(frozen=True)
class VadConfig:
    frame_ms: float = 30.0
    hop_ms: float = 10.0
    threshold_db: float = 30.0  # frames this far below peak energy are silence
    hangover_frames: int = 5


def _parse_fmt(chunk: bytes) -> tuple[int, int, int, int]:
    if len(chunk) < 16:
        raise AudioError("bad_wav", "fmt chunk truncated")
    fmt, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", chunk, 0)
    if fmt == _WAVE_FORMAT_EXTENSIBLE:
        if len(chunk) < 40:
            raise AudioError("bad_wav", "extensible fmt chunk truncated")
        # first two bytes of the SubFormat GUID carry the real format code
        fmt = struct.unpack_from("<H", chunk, 24)[0]
    return fmt, channels, rate, bits


def _iter_chunks(data: bytes):
    pos = 12
    while pos + 8 <= len(data):
        cid, size = struct.unpack_from("<4sI", data, pos)
        body = data[pos + 8 : pos + 8 + size]
        yield cid, body
        pos += 8 + size + (size & 1)  # chunks are word-aligned


def decode_wav(data: bytes) -> AudioBuffer:
    """Decode RIFF/WAVE PCM bytes to a normalized mono buffer."""
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise AudioError("bad_wav", "not a RIFF/WAVE stream")

    fmt = None
    pcm = None
    for cid, body in _iter_chunks(data):
        if cid == b"fmt ":
            fmt = _parse_fmt(body)
        elif cid == b"data":
            pcm = body
    if fmt is None or pcm is None:
        raise AudioError("bad_wav", "missing fmt or data chunk")

    fmt_code, channels, rate, bits = fmt
    if channels < 1 or rate < 1:
        raise AudioError("bad_wav", "invalid channel count or sample rate")

    if fmt_code == _WAVE_FORMAT_PCM:
        if bits == 8:
            x = np.frombuffer(pcm, dtype=np.uint8).astype(np.float64)
            x = (x - 128.0) / 128.0
        elif bits == 16:
            x = np.frombuffer(pcm[: len(pcm) // 2 * 2], dtype="<i2").astype(np.float64) / 32768.0
        elif bits == 24:
            raw = np.frombuffer(pcm[: len(pcm) // 3 * 3], dtype=np.uint8).reshape(-1, 3)
            val = (
                raw[:, 0].astype(np.int32)
                | (raw[:, 1].astype(np.int32) << 8)
                | (raw[:, 2].astype(np.int8).astype(np.int32) << 16)
            )
            x = val.astype(np.float64) / 8388608.0
        elif bits == 32:
            x = np.frombuffer(pcm[: len(pcm) // 4 * 4], dtype="<i4").astype(np.float64) / 2147483648.0
        else:
            raise AudioError("unsupported_format", f"{bits}-bit integer PCM")
    elif fmt_code == _WAVE_FORMAT_IEEE_FLOAT:
        if bits != 32:
            raise AudioError("unsupported_format", f"{bits}-bit float PCM")
        x = np.frombuffer(pcm[: len(pcm) // 4 * 4], dtype="<f4").astype(np.float64)
        x = np.clip(x, -1.0, 1.0)
    else:
        raise AudioError("unsupported_format", f"format tag {fmt_code}")

    if channels > 1:
        n = len(x) // channels
        x = x[: n * channels].reshape(n, channels).mean(axis=1)

    return AudioBuffer(samples=x, sample_rate_hz=rate, bit_depth_origin=bits)


def quantize16(x: np.ndarray) -> np.ndarray:
    """Round half away from zero to the 16-bit grid, clamping to [-1, 1]."""
    q = np.where(x >= 0, np.floor(x * 32768.0 + 0.5), np.ceil(x * 32768.0 - 0.5))
    q = np.clip(q, -32768, 32767)
    return q / 32768.0


def encode_wav(buf: AudioBuffer, bits: int = 16) -> bytes:
    if bits != 16:
        raise AudioError("unsupported_format", f"only 16-bit output supported, got {bits}")
    pcm = (quantize16(np.asarray(buf.samples, dtype=np.float64)) * 32768.0).astype("<i2")
    data = pcm.tobytes()
    rate = buf.sample_rate_hz
    hdr = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(data),
        b"WAVE",
        b"fmt ",
        16,
        _WAVE_FORMAT_PCM,
        1,
        rate,
        rate * 2,
        2,
        16,
        b"data",
        len(data),
    )
    return hdr + data


def read_wav(path: str | Path) -> AudioBuffer:
    return decode_wav(Path(path).read_bytes())


def write_wav(path: str | Path, buf: AudioBuffer, bits: int = 16) -> None:
    Path(path).write_bytes(encode_wav(buf, bits=bits))


def wav_duration_s(path: str | Path) -> float:
    """Duration from header fields only (no sample decode)."""
    with open(path, "rb") as f:
        head = f.read(12)
        if len(head) < 12 or head[:4] != b"RIFF" or head[8:12] != b"WAVE":
            raise AudioError("bad_wav", f"not a RIFF/WAVE file: {path}")
        rate = channels = bits = None
        data_bytes = None
        while True:
            chunk_hdr = f.read(8)
            if len(chunk_hdr) < 8:
                break
            cid, size = struct.unpack("<4sI", chunk_hdr)
            if cid == b"fmt ":
                body = f.read(size)
                _, channels, rate, bits = _parse_fmt(body)
            elif cid == b"data":
                data_bytes = size
                f.seek(size + (size & 1), 1)
            else:
                f.seek(size + (size & 1), 1)
    if rate is None or data_bytes is None or not channels or not bits:
        raise AudioError("bad_wav", f"missing fmt or data chunk: {path}")
    frames = data_bytes // (channels * (bits // 8))
    return frames / rate


def _kaiser(u: np.ndarray, beta: float = KAISER_BETA) -> np.ndarray:
    inside = np.clip(1.0 - u * u, 0.0, None)
    return np.where(np.abs(u) <= 1.0, np.i0(beta * np.sqrt(inside)) / np.i0(beta), 0.0)


def resample(x: np.ndarray, source_rate: int, target_rate: int, taps: int = 64) -> np.ndarray:
    """Windowed-sinc (Kaiser) polyphase resampling.

    Integer rates make the ratio rational (up L / down M), so only L distinct
    fractional offsets exist and the kernel table is L x taps. `taps` is the
    kernel width in source samples; output length is round(n * target /
    source). Edges are extended (replicated) so DC signals stay constant.
    """
    from math import gcd

    x = np.asarray(x, dtype=np.float64)
    if source_rate == target_rate:
        return x.copy()
    n_out = int(round(len(x) * target_rate / source_rate))
    if len(x) == 0 or n_out == 0:
        return np.zeros(0)

    g = gcd(source_rate, target_rate)
    up, down = target_rate // g, source_rate // g
    cutoff = min(1.0, target_rate / source_rate)
    half = max(1, taps // 2)
    k = np.arange(-half + 1, half + 1)
    xp = np.pad(x, (half, half + 1), mode="edge")

    y = np.empty(n_out)
    for phase in range(min(up, n_out)):
        frac = (phase * down % up) / up
        t = k - frac
        w = cutoff * np.sinc(cutoff * t) * _kaiser(t / half)
        w /= w.sum()
        j = np.arange(phase, n_out, up)
        base = (j * down) // up
        y[j] = (xp[base[:, None] + (k[None, :] + half)] * w[None, :]).sum(axis=1)
    return y


def convert_pcm(a: AudioBuffer, target_rate_hz: int, target_bits: int = 16, taps: int = 64) -> AudioBuffer:
    """Resample then quantize to the target PCM grid."""
    if target_rate_hz <= 0:
        raise AudioError("bad_rate", f"target rate must be positive, got {target_rate_hz}")
    if target_bits != 16:
        raise AudioError("unsupported_format", f"only 16-bit targets supported, got {target_bits}")
    y = resample(np.asarray(a.samples, dtype=np.float64), a.sample_rate_hz, target_rate_hz, taps=taps)
    return AudioBuffer(samples=quantize16(y), sample_rate_hz=target_rate_hz, bit_depth_origin=target_bits)


def _frame_energies(x: np.ndarray, frame: int, hop: int) -> np.ndarray:
    if len(x) < frame:
        return np.zeros(0)
    windows = np.lib.stride_tricks.sliding_window_view(x, frame)[::hop]
    return (windows * windows).mean(axis=1)


def detect_voiced(a: AudioBuffer, cfg: VadConfig | None = None) -> list[VoicedSegment]:
    """Short-time-energy VAD with hangover smoothing.

    Frames whose energy is within `threshold_db` of the peak frame energy are
    active; inactive gaps of up to `hangover_frames` between active runs are
    bridged. Segments touching the first/last frame snap to the buffer edges
    so an all-voiced signal yields exactly [0, duration].
    """
    cfg = cfg or VadConfig()
    x = np.asarray(a.samples, dtype=np.float64)
    rate = a.sample_rate_hz
    frame = max(1, int(round(cfg.frame_ms * rate / 1000.0)))
    hop = max(1, int(round(cfg.hop_ms * rate / 1000.0)))
    duration = a.duration_s

    energies = _frame_energies(x, frame, hop)
    if len(energies) == 0:
        # shorter than one frame: treat the whole thing as voiced if nonzero
        if len(x) and float(np.max(np.abs(x))) > 0.0:
            return [VoicedSegment(0.0, duration)]
        return []

    peak = float(energies.max())
    if peak <= 0.0:
        return []
    threshold = peak * 10.0 ** (-cfg.threshold_db / 10.0)
    active = energies >= threshold

    frame_s = frame / rate
    hop_s = hop / rate
    n = len(active)

    runs: list[list[int]] = []  # [first_frame, last_frame] inclusive
    run_start = None
    for i, on in enumerate(active):
        if on and run_start is None:
            run_start = i
        elif not on and run_start is not None:
            runs.append([run_start, i - 1])
            run_start = None
    if run_start is not None:
        runs.append([run_start, n - 1])

    merged: list[list[int]] = []
    for first, last in runs:
        if merged and first - merged[-1][1] - 1 <= cfg.hangover_frames:
            merged[-1][1] = last
        else:
            merged.append([first, last])

    segments = []
    for first, last in merged:
        start = 0.0 if first == 0 else first * hop_s
        end = duration if last == n - 1 else min(duration, last * hop_s + frame_s)
        segments.append(VoicedSegment(start, end))
    return segments


def trim_silence(a: AudioBuffer, cfg: VadConfig | None = None) -> AudioBuffer:
    """Concatenate the voiced regions in order."""
    segments = detect_voiced(a, cfg)
    x = np.asarray(a.samples, dtype=np.float64)
    if not segments:
        return AudioBuffer(samples=np.zeros(0), sample_rate_hz=a.sample_rate_hz, bit_depth_origin=a.bit_depth_origin)
    pieces = []
    for seg in segments:
        i0 = int(round(seg.start_s * a.sample_rate_hz))
        i1 = int(round(seg.end_s * a.sample_rate_hz))
        pieces.append(x[i0:i1])
    return AudioBuffer(
        samples=np.concatenate(pieces),
        sample_rate_hz=a.sample_rate_hz,
        bit_depth_origin=a.bit_depth_origin,
    )
