"""Short-time intensity: framing, windows, clamps, band-pass."""

import math

import numpy as np
import pytest

from conftest import tone_recording
from nasalance.audio_io import StereoRecording
from nasalance.intensity import (
    DB_CLAMP_FLOOR,
    BandpassSpec,
    FrameConfig,
    bandpass,
    frame_intensity_db,
    intensity_to_csv,
    intensity_track,
)


def test_unit_sine_is_minus_3dB():
    # integer number of periods so the discrete RMS is exactly 1/sqrt(2)
    n = 4800
    t = np.arange(n) / 48000.0
    frame = np.sin(2 * np.pi * 100.0 * t)
    expected = 20.0 * math.log10(1.0 / math.sqrt(2.0))
    assert frame_intensity_db(frame, "rectangular") == pytest.approx(expected, abs=1e-9)


def test_all_zero_frame_clamps():
    assert frame_intensity_db(np.zeros(100), "rectangular") == DB_CLAMP_FLOOR
    assert frame_intensity_db(np.zeros(100), "hann") == DB_CLAMP_FLOOR


def test_dc_half_scale():
    frame = np.full(256, 0.5)
    expected = 20.0 * math.log10(0.5)
    assert frame_intensity_db(frame, "rectangular") == pytest.approx(expected, abs=1e-12)


def test_window_normalization_constant_signal():
    frame = np.full(513, 0.37)
    rect = frame_intensity_db(frame, "rectangular")
    hann = frame_intensity_db(frame, "hann")
    assert rect == pytest.approx(hann, abs=1e-9)


def test_empty_frame_rejected():
    with pytest.raises(ValueError):
        frame_intensity_db(np.array([]))


def enumerate_frame_count(n, frame_len, step):
    count, start = 0, 0
    while start + frame_len <= n:
        count += 1
        start = int(round(count * step))
    return count


def test_frame_count_one_second_48k():
    rec = tone_recording(duration_s=1.0, sample_rate=48000)
    track = intensity_track(rec, FrameConfig())
    oracle = enumerate_frame_count(48000, 1536, 384.0)
    assert oracle == 122  # floor((48000-1536)/384)+1, frozen from the enumeration
    assert len(track) == oracle
    assert track.times[0] == pytest.approx(0.016, abs=1e-12)


def test_single_frame_recording():
    rec = tone_recording(duration_s=0.032, sample_rate=48000)
    track = intensity_track(rec, FrameConfig())
    assert len(track) == 1


def test_too_short_recording():
    rec = tone_recording(duration_s=0.010, sample_rate=48000)
    with pytest.raises(ValueError, match="shorter than one"):
        intensity_track(rec, FrameConfig())


def test_silent_recording_clamps_both_channels():
    rec = StereoRecording(np.zeros(48000), np.zeros(48000), 48000)
    track = intensity_track(rec, FrameConfig())
    assert np.all(track.nasal_db == DB_CLAMP_FLOOR)
    assert np.all(track.oral_db == DB_CLAMP_FLOOR)


def test_fractional_hop_keeps_ideal_time_base():
    # 8 ms at 44100 Hz is 352.8 samples; times must still advance 8 ms
    rec = tone_recording(duration_s=1.0, sample_rate=44100)
    track = intensity_track(rec, FrameConfig())
    diffs = np.diff(track.times)
    assert np.max(np.abs(diffs - 0.008)) < 1e-9
    frame_len = FrameConfig().frame_samples(44100)
    assert track.times[0] == pytest.approx(frame_len / (2 * 44100.0), abs=1e-12)


def test_gain_shift_moves_one_channel_only():
    rng = np.random.default_rng(11)
    x = rng.uniform(-0.4, 0.4, 48000)
    y = rng.uniform(-0.4, 0.4, 48000)
    base = intensity_track(StereoRecording(x, y, 48000), FrameConfig())
    g = 0.37
    gained = intensity_track(StereoRecording(g * x, y, 48000), FrameConfig())
    shift = 20.0 * math.log10(g)
    assert np.max(np.abs((gained.nasal_db - base.nasal_db) - shift)) < 1e-9
    np.testing.assert_array_equal(gained.oral_db, base.oral_db)


def test_frame_config_validation():
    with pytest.raises(ValueError, match="step_ms"):
        FrameConfig(frame_length_ms=10, step_ms=20)
    with pytest.raises(ValueError, match="step_ms"):
        FrameConfig(step_ms=0)
    with pytest.raises(ValueError, match="window"):
        FrameConfig(window="hamming")
    with pytest.raises(ValueError, match="under 2 samples"):
        FrameConfig(frame_length_ms=0.01, step_ms=0.01).frame_samples(8000)


def measured_rms(x):
    return float(np.sqrt(np.mean(x * x)))


def test_bandpass_passband_and_stopband():
    sr = 48000.0
    t = np.arange(int(sr)) / sr
    spec = BandpassSpec(low_hz=300.0, high_hz=750.0, order=4)

    inband = 0.5 * np.sin(2 * np.pi * 500.0 * t)
    rec = StereoRecording(inband, inband, sr)
    out = bandpass(rec, spec)
    # steady-state region, away from filter edge transients
    sl = slice(int(0.1 * sr), int(0.9 * sr))
    drop_db = 20 * math.log10(measured_rms(out.nasal[sl]) / measured_rms(inband[sl]))
    assert abs(drop_db) < 1.0

    low = 0.5 * np.sin(2 * np.pi * 50.0 * t)
    out = bandpass(StereoRecording(low, low, sr), spec)
    atten_db = 20 * math.log10(measured_rms(low[sl]) / measured_rms(out.nasal[sl]))
    assert atten_db >= 24.0


def test_bandpass_applied_identically():
    rng = np.random.default_rng(5)
    x = rng.uniform(-0.5, 0.5, 48000)
    rec = StereoRecording(x, x.copy(), 48000)
    out = bandpass(rec, BandpassSpec(300, 3000))
    np.testing.assert_array_equal(out.nasal, out.oral)


def test_bandpass_spec_validation():
    with pytest.raises(ValueError, match="low_hz < high_hz"):
        BandpassSpec(low_hz=800, high_hz=300)
    with pytest.raises(ValueError, match="even"):
        BandpassSpec(low_hz=300, high_hz=800, order=3)
    rec = tone_recording(duration_s=0.2)
    with pytest.raises(ValueError, match="Nyquist"):
        bandpass(rec, BandpassSpec(low_hz=300, high_hz=30000))


def test_intensity_csv_format():
    rec = tone_recording(duration_s=0.1)
    track = intensity_track(rec, FrameConfig())
    text = intensity_to_csv(track)
    lines = text.strip().split("\n")
    assert lines[0] == "t_s,nasal_db,oral_db"
    assert lines[1].startswith("0.016000,")
    assert len(lines) == len(track) + 1


def test_db_never_positive_for_legal_signals():
    rng = np.random.default_rng(2)
    x = rng.uniform(-1.0, 1.0, 48000)
    track = intensity_track(StereoRecording(x, -x, 48000), FrameConfig())
    assert np.max(track.nasal_db) <= 0.0
    assert np.min(track.nasal_db) >= DB_CLAMP_FLOOR