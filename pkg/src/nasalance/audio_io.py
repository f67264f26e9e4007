"""Load and validate two-channel WAV recordings with nasal/oral channel roles.

Supports RIFF/WAVE with PCM 16/24/32-bit integer or 32-bit float samples.
No resampling is performed anywhere: mismatched rates are an error so the
intensity frame timing downstream stays exact.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import AudioFormatError

_STEREO_SOURCES = ("left", "right")


@dataclass(frozen=True)
class ChannelMap:
    """Which physical channel feeds which microphone role."""

    nasal_source: str = "left"
    oral_source: str = "right"

    def __post_init__(self):
        for name in (self.nasal_source, self.oral_source):
            if name not in _STEREO_SOURCES:
                raise ValueError(f"unknown channel source {name!r}")
        if self.nasal_source == self.oral_source:
            raise ValueError("nasal and oral cannot come from the same channel")


@dataclass(frozen=True)
class StereoRecording:
    """Paired nasal/oral sample sequences at a common sample rate.

    Samples are float64, normalized to [-1, 1]. Instances are immutable and
    safe to share between threads.
    """

    nasal: np.ndarray
    oral: np.ndarray
    sample_rate: float
    source_id: str = ""

    def __post_init__(self):
        nasal = np.asarray(self.nasal, dtype=np.float64)
        oral = np.asarray(self.oral, dtype=np.float64)
        if nasal.ndim != 1 or oral.ndim != 1:
            raise ValueError("channels must be one-dimensional")
        if len(nasal) != len(oral):
            raise ValueError(
                f"channel lengths differ: nasal {len(nasal)}, oral {len(oral)}"
            )
        if len(nasal) < 1:
            raise ValueError("recording is empty")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be > 0, got {self.sample_rate}")
        for name, ch in (("nasal", nasal), ("oral", oral)):
            if not np.all(np.isfinite(ch)):
                raise ValueError(f"{name} channel contains non-finite samples")
            peak = np.max(np.abs(ch)) if len(ch) else 0.0
            if peak > 1.0:
                raise ValueError(f"{name} channel exceeds full scale (peak {peak:g})")
        nasal.flags.writeable = False
        oral.flags.writeable = False
        object.__setattr__(self, "nasal", nasal)
        object.__setattr__(self, "oral", oral)

    @property
    def n_samples(self) -> int:
        return len(self.nasal)

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate


def _read_chunks(data: bytes, path: str):
    """Yield (chunk_id, body_offset, body_size) for every RIFF chunk."""
    if len(data) < 12:
        raise AudioFormatError(f"{path}: too short to be a RIFF file", byte_offset=0)
    if data[0:4] != b"RIFF":
        raise AudioFormatError(f"{path}: missing RIFF magic", byte_offset=0)
    if data[8:12] != b"WAVE":
        raise AudioFormatError(f"{path}: not a WAVE container", byte_offset=8)
    pos = 12
    while pos < len(data):
        if pos + 8 > len(data):
            raise AudioFormatError(
                f"{path}: truncated chunk header", byte_offset=pos
            )
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = pos + 8
        yield chunk_id, body, size
        pos = body + size + (size & 1)  # chunks are word-aligned


def _decode_samples(raw: bytes, audio_format: int, bits: int, offset: int, path: str):
    """Decode interleaved sample bytes to float64 in [-1, 1]."""
    if audio_format == 1 and bits == 16:
        ints = np.frombuffer(raw, dtype="<i2")
        return ints.astype(np.float64) / 2**15
    if audio_format == 1 and bits == 24:
        padded = np.zeros((len(raw) // 3, 4), dtype=np.uint8)
        padded[:, 1:] = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3)
        ints = padded.view("<i4").reshape(-1) >> 8
        return ints.astype(np.float64) / 2**23
    if audio_format == 1 and bits == 32:
        ints = np.frombuffer(raw, dtype="<i4")
        return ints.astype(np.float64) / 2**31
    if audio_format == 3 and bits == 32:
        return np.frombuffer(raw, dtype="<f4").astype(np.float64)
    raise AudioFormatError(
        f"{path}: unsupported codec (format {audio_format}, {bits}-bit)",
        byte_offset=offset,
    )


def read_wav(path) -> tuple[list[np.ndarray], float]:
    """Read a WAV file; returns (per-channel normalized samples, sample rate)."""
    channels, sample_rate, _ = _read_wav_full(path)
    return channels, sample_rate


def _read_wav_full(path) -> tuple[list[np.ndarray], float, int]:
    """read_wav plus the fmt chunk body offset, for error reporting."""
    path = Path(path)
    data = path.read_bytes()
    fmt = None
    fmt_offset = None
    channels = None
    for chunk_id, body, size in _read_chunks(data, path.name):
        if chunk_id == b"fmt ":
            if body + 16 > len(data) or size < 16:
                raise AudioFormatError(
                    f"{path.name}: truncated fmt chunk", byte_offset=body
                )
            fmt = struct.unpack_from("<HHIIHH", data, body)
            fmt_offset = body
        elif chunk_id == b"data":
            if fmt is None:
                raise AudioFormatError(
                    f"{path.name}: data chunk before fmt chunk", byte_offset=body
                )
            audio_format, n_channels, sample_rate, _, block_align, bits = fmt
            if n_channels < 1:
                raise AudioFormatError(
                    f"{path.name}: zero channels", byte_offset=fmt_offset + 2
                )
            if body + size > len(data):
                raise AudioFormatError(
                    f"{path.name}: truncated data chunk "
                    f"(declared {size} bytes, {len(data) - body} available)",
                    byte_offset=len(data),
                )
            if block_align != n_channels * bits // 8 or size % block_align:
                raise AudioFormatError(
                    f"{path.name}: data size {size} not a whole number of frames",
                    byte_offset=body,
                )
            samples = _decode_samples(
                data[body : body + size], audio_format, bits, fmt_offset, path.name
            )
            channels = [samples[c::n_channels] for c in range(n_channels)]
            for ch in channels:
                if not np.all(np.isfinite(ch)):
                    raise AudioFormatError(
                        f"{path.name}: non-finite float samples", byte_offset=body
                    )
                if len(ch) and np.max(np.abs(ch)) > 1.0:
                    raise AudioFormatError(
                        f"{path.name}: float samples exceed full scale",
                        byte_offset=body,
                    )
            return channels, float(sample_rate), fmt_offset
    if fmt is None:
        raise AudioFormatError(f"{path.name}: no fmt chunk found", byte_offset=len(data))
    raise AudioFormatError(f"{path.name}: no data chunk found", byte_offset=len(data))


def load_stereo(path, channel_map: ChannelMap | None = None) -> StereoRecording:
    """Load one stereo WAV file, assigning channels per the map."""
    channel_map = channel_map or ChannelMap()
    path = Path(path)
    channels, sample_rate, fmt_offset = _read_wav_full(path)
    if len(channels) != 2:
        raise AudioFormatError(
            f"{path.name}: channel count != 2 (got {len(channels)})",
            byte_offset=fmt_offset + 2,  # the fmt chunk's channel field
        )
    by_source = {"left": channels[0], "right": channels[1]}
    return StereoRecording(
        nasal=by_source[channel_map.nasal_source],
        oral=by_source[channel_map.oral_source],
        sample_rate=sample_rate,
        source_id=path.name,
    )


def load_pair(nasal_path, oral_path) -> StereoRecording:
    """Load nasal and oral channels recorded to separate mono files.

    The shorter channel is zero-padded at the end (never truncated) so
    annotation time axes that reference the longer file stay valid; the
    padding is recorded in source_id.
    """
    nasal_path, oral_path = Path(nasal_path), Path(oral_path)
    loaded = {}
    for role, path in (("nasal", nasal_path), ("oral", oral_path)):
        channels, rate, fmt_offset = _read_wav_full(path)
        if len(channels) != 1:
            raise AudioFormatError(
                f"{path.name}: channel count != 1 (got {len(channels)})",
                byte_offset=fmt_offset + 2,
            )
        loaded[role] = (channels[0], rate)
    nasal, nasal_rate = loaded["nasal"]
    oral, oral_rate = loaded["oral"]
    if nasal_rate != oral_rate:
        raise AudioFormatError(
            f"sample-rate mismatch: {nasal_path.name} is {nasal_rate:g} Hz, "
            f"{oral_path.name} is {oral_rate:g} Hz"
        )
    source_id = f"{nasal_path.name}+{oral_path.name}"
    if len(nasal) != len(oral):
        pad = abs(len(nasal) - len(oral))
        if len(nasal) < len(oral):
            nasal = np.concatenate([nasal, np.zeros(pad)])
            source_id += f"#pad_nasal={pad}"
        else:
            oral = np.concatenate([oral, np.zeros(pad)])
            source_id += f"#pad_oral={pad}"
    return StereoRecording(
        nasal=nasal, oral=oral, sample_rate=nasal_rate, source_id=source_id
    )


def write_wav(path, channels, sample_rate, sample_format="float32"):
    """Write a WAV file from per-channel float arrays in [-1, 1].

    sample_format is one of pcm16, pcm24, pcm32, float32.
    """
    channels = [np.asarray(ch, dtype=np.float64) for ch in channels]
    n = len(channels[0])
    if any(len(ch) != n for ch in channels):
        raise ValueError("all channels must have equal length")
    interleaved = np.empty(n * len(channels))
    for i, ch in enumerate(channels):
        interleaved[i :: len(channels)] = ch

    if sample_format == "pcm16":
        fmt_code, bits = 1, 16
        payload = (
            np.clip(np.rint(interleaved * 2**15), -(2**15), 2**15 - 1)
            .astype("<i2")
            .tobytes()
        )
    elif sample_format == "pcm24":
        fmt_code, bits = 1, 24
        ints = np.clip(np.rint(interleaved * 2**23), -(2**23), 2**23 - 1).astype(
            "<i4"
        )
        payload = ints.view(np.uint8).reshape(-1, 4)[:, :3].tobytes()
    elif sample_format == "pcm32":
        fmt_code, bits = 1, 32
        payload = (
            np.clip(np.rint(interleaved * 2**31), -(2**31), 2**31 - 1)
            .astype("<i4")
            .tobytes()
        )
    elif sample_format == "float32":
        fmt_code, bits = 3, 32
        payload = interleaved.astype("<f4").tobytes()
    else:
        raise ValueError(f"unknown sample format {sample_format!r}")

    n_channels = len(channels)
    block_align = n_channels * bits // 8
    byte_rate = int(sample_rate) * block_align
    header = b"RIFF"
    header += struct.pack("<I", 4 + 8 + 16 + 8 + len(payload))
    header += b"WAVEfmt "
    header += struct.pack(
        "<IHHIIHH", 16, fmt_code, n_channels, int(sample_rate), byte_rate,
        block_align, bits,
    )
    header += b"data" + struct.pack("<I", len(payload))
    Path(path).write_bytes(header + payload)
