"""WAV loading against hand-assembled byte fixtures."""

import struct

import numpy as np
import pytest

from nasalance.audio_io import (
    ChannelMap,
    StereoRecording,
    load_pair,
    load_stereo,
    read_wav,
    write_wav,
)
from nasalance.errors import AudioFormatError


def wav_bytes(fmt_code, n_channels, bits, payload, sr=48000):
    block_align = n_channels * bits // 8
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVEfmt "
    header += struct.pack(
        "<IHHIIHH", 16, fmt_code, n_channels, sr, sr * block_align, block_align, bits
    )
    return header + b"data" + struct.pack("<I", len(payload)) + payload


def test_load_stereo_16bit_normalization(tmp_path):
    frames = [(16384, -8192), (0, 32767), (-32768, 1)]
    payload = b"".join(struct.pack("<hh", l, r) for l, r in frames)
    path = tmp_path / "s.wav"
    path.write_bytes(wav_bytes(1, 2, 16, payload))
    rec = load_stereo(path)
    assert rec.sample_rate == 48000
    np.testing.assert_array_equal(rec.nasal, [16384 / 32768, 0.0, -1.0])
    np.testing.assert_array_equal(rec.oral, [-8192 / 32768, 32767 / 32768, 1 / 32768])
    assert rec.source_id == "s.wav"


def test_load_stereo_swapped_map(tmp_path):
    payload = struct.pack("<hh", 100, 200)
    path = tmp_path / "s.wav"
    path.write_bytes(wav_bytes(1, 2, 16, payload))
    direct = load_stereo(path, ChannelMap(nasal_source="left", oral_source="right"))
    swapped = load_stereo(path, ChannelMap(nasal_source="right", oral_source="left"))
    np.testing.assert_array_equal(direct.nasal, swapped.oral)
    np.testing.assert_array_equal(direct.oral, swapped.nasal)


def test_load_stereo_float32_identity(tmp_path):
    samples = np.array([1.0, -1.0, 0.25, 0.0], dtype="<f4")  # L R L R
    path = tmp_path / "f.wav"
    path.write_bytes(wav_bytes(3, 2, 32, samples.tobytes()))
    rec = load_stereo(path)
    np.testing.assert_array_equal(rec.nasal, [1.0, 0.25])
    np.testing.assert_array_equal(rec.oral, [-1.0, 0.0])


def test_load_stereo_24bit(tmp_path):
    def pack24(v):
        return struct.pack("<i", v)[:3]

    payload = pack24(2**22) + pack24(-(2**23)) + pack24(0) + pack24(2**23 - 1)
    path = tmp_path / "x.wav"
    path.write_bytes(wav_bytes(1, 2, 24, payload))
    rec = load_stereo(path)
    np.testing.assert_array_equal(rec.nasal, [0.5, 0.0])
    np.testing.assert_array_equal(rec.oral, [-1.0, (2**23 - 1) / 2**23])


def test_load_stereo_32bit_int(tmp_path):
    payload = struct.pack("<ii", 2**30, -(2**31))
    path = tmp_path / "x.wav"
    path.write_bytes(wav_bytes(1, 2, 32, payload))
    rec = load_stereo(path)
    assert rec.nasal[0] == 0.5
    assert rec.oral[0] == -1.0


def test_mono_rejected_by_load_stereo(tmp_path):
    path = tmp_path / "m.wav"
    path.write_bytes(wav_bytes(1, 1, 16, struct.pack("<h", 1)))
    with pytest.raises(AudioFormatError, match="channel count") as err:
        load_stereo(path)
    assert err.value.byte_offset == 22  # channel field inside the fmt chunk


def test_unsupported_bit_depth_reports_offset(tmp_path):
    path = tmp_path / "b.wav"
    path.write_bytes(wav_bytes(1, 2, 8, b"\x00\x00"))
    with pytest.raises(AudioFormatError, match="unsupported codec") as err:
        load_stereo(path)
    assert err.value.byte_offset == 20  # fmt chunk body


def test_truncated_data_chunk(tmp_path):
    good = wav_bytes(1, 2, 16, struct.pack("<hh", 1, 2) * 10)
    path = tmp_path / "t.wav"
    path.write_bytes(good[:-7])
    with pytest.raises(AudioFormatError, match="truncated data") as err:
        load_stereo(path)
    assert err.value.byte_offset == len(good) - 7


def test_not_riff(tmp_path):
    path = tmp_path / "n.wav"
    path.write_bytes(b"OggS" + b"\x00" * 40)
    with pytest.raises(AudioFormatError, match="RIFF") as err:
        load_stereo(path)
    assert err.value.byte_offset == 0


def test_float_out_of_range_rejected(tmp_path):
    samples = np.array([1.5, 0.0], dtype="<f4")
    path = tmp_path / "f.wav"
    path.write_bytes(wav_bytes(3, 2, 32, samples.tobytes()))
    with pytest.raises(AudioFormatError, match="full scale"):
        load_stereo(path)


def test_load_pair_equal_lengths(tmp_path):
    for name, value in (("n.wav", 0.5), ("o.wav", -0.5)):
        write_wav(tmp_path / name, [np.full(48000, value)], 48000, "float32")
    rec = load_pair(tmp_path / "n.wav", tmp_path / "o.wav")
    assert rec.n_samples == 48000
    assert rec.nasal[0] == 0.5 and rec.oral[0] == -0.5
    assert rec.source_id == "n.wav+o.wav"


def test_load_pair_pads_shorter_channel(tmp_path):
    write_wav(tmp_path / "n.wav", [np.full(48000, 0.5)], 48000, "float32")
    write_wav(tmp_path / "o.wav", [np.full(47990, 0.25)], 48000, "float32")
    rec = load_pair(tmp_path / "n.wav", tmp_path / "o.wav")
    assert rec.n_samples == 48000
    np.testing.assert_array_equal(rec.oral[-10:], np.zeros(10))
    assert rec.oral[-11] == 0.25
    assert "pad_oral=10" in rec.source_id


def test_load_pair_rate_mismatch(tmp_path):
    write_wav(tmp_path / "n.wav", [np.zeros(100)], 48000, "pcm16")
    write_wav(tmp_path / "o.wav", [np.zeros(100)], 44100, "pcm16")
    with pytest.raises(AudioFormatError, match="sample-rate mismatch"):
        load_pair(tmp_path / "n.wav", tmp_path / "o.wav")


def test_load_pair_rejects_stereo_member(tmp_path):
    write_wav(tmp_path / "n.wav", [np.zeros(10), np.zeros(10)], 48000, "pcm16")
    write_wav(tmp_path / "o.wav", [np.zeros(10)], 48000, "pcm16")
    with pytest.raises(AudioFormatError, match="channel count"):
        load_pair(tmp_path / "n.wav", tmp_path / "o.wav")


def test_pcm16_normalization_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    ints = rng.integers(-(2**15), 2**15, size=400)
    floats = ints / 2**15
    write_wav(tmp_path / "r.wav", [floats, floats[::-1]], 48000, "pcm16")
    channels, _ = read_wav(tmp_path / "r.wav")
    np.testing.assert_array_equal(channels[0] * 2**15, ints)
    np.testing.assert_array_equal(channels[1] * 2**15, ints[::-1])


@pytest.mark.parametrize("fmt", ["pcm16", "pcm24", "pcm32", "float32"])
def test_write_read_all_formats(tmp_path, fmt):
    rng = np.random.default_rng(3)
    x = rng.uniform(-0.9, 0.9, 200)
    write_wav(tmp_path / "w.wav", [x, -x], 44100, fmt)
    channels, sr = read_wav(tmp_path / "w.wav")
    assert sr == 44100
    tol = {"pcm16": 2**-15, "pcm24": 2**-23, "pcm32": 2**-31, "float32": 2**-23}[fmt]
    np.testing.assert_allclose(channels[0], x, atol=tol)
    np.testing.assert_allclose(channels[1], -x, atol=tol)


def test_stereo_recording_validation():
    with pytest.raises(ValueError, match="lengths differ"):
        StereoRecording(nasal=np.zeros(3), oral=np.zeros(4), sample_rate=48000)
    with pytest.raises(ValueError, match="empty"):
        StereoRecording(nasal=np.zeros(0), oral=np.zeros(0), sample_rate=48000)
    with pytest.raises(ValueError, match="full scale"):
        StereoRecording(nasal=np.array([1.5]), oral=np.array([0.0]), sample_rate=48000)
    with pytest.raises(ValueError, match="non-finite"):
        StereoRecording(nasal=np.array([np.nan]), oral=np.array([0.0]), sample_rate=48000)
    with pytest.raises(ValueError, match="sample_rate"):
        StereoRecording(nasal=np.zeros(2), oral=np.zeros(2), sample_rate=0)


def test_channel_map_validation():
    with pytest.raises(ValueError, match="same channel"):
        ChannelMap(nasal_source="left", oral_source="left")
    with pytest.raises(ValueError, match="unknown"):
        ChannelMap(nasal_source="centre", oral_source="left")


def test_recording_is_immutable(tmp_path):
    rec = StereoRecording(nasal=np.zeros(4), oral=np.zeros(4), sample_rate=48000)
    with pytest.raises(ValueError):
        rec.nasal[0] = 1.0