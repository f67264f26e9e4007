"""Estimate and correct inter-channel gain imbalance.

A calibration take plays the same stimulus into both microphones; any
median dB difference between the channels is a gain offset, which inflates
or deflates every nasalance value. The correction is applied to the nasal
channel by convention; nasalance depends only on the difference, so the
direction is arbitrary but must be consistent for profiles to be
interchangeable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio_io import StereoRecording
from .errors import CalibrationError, InputFormatError
from .intensity import FrameConfig, IntensityTrack, intensity_track, shift_nasal_db

MIN_CALIBRATION_FRAMES = 10


@dataclass(frozen=True)
class CalibrationProfile:
    """Flat gain offset: nasal minus oral channel response to one stimulus."""

    gain_offset_db: float
    created_from: str = ""
    stimulus_window: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not np.isfinite(self.gain_offset_db):
            raise ValueError("gain_offset_db must be finite")
        object.__setattr__(self, "stimulus_window", tuple(self.stimulus_window))


def estimate_gain_offset(
    rec: StereoRecording,
    cfg: FrameConfig | None = None,
    window: tuple[float, float] | None = None,
) -> CalibrationProfile:
    """Median per-frame dB difference (nasal - oral) over a same-stimulus take.

    The median is robust to transient frames at stimulus onset/offset.
    Raises CalibrationError with fewer than 10 valid frames.
    """
    cfg = cfg or FrameConfig()
    if window is not None:
        t0, t1 = window
        sr = rec.sample_rate
        i0, i1 = max(0, int(round(t0 * sr))), min(rec.n_samples, int(round(t1 * sr)))
        if i1 - i0 < 1:
            raise CalibrationError(f"stimulus window [{t0}, {t1}] selects no samples")
        rec = StereoRecording(
            nasal=rec.nasal[i0:i1],
            oral=rec.oral[i0:i1],
            sample_rate=sr,
            source_id=rec.source_id,
        )
    else:
        window = (0.0, rec.duration_s)
    it = intensity_track(rec, cfg)
    valid = np.maximum(it.nasal_db, it.oral_db) > cfg.silence_floor_db
    n_valid = int(valid.sum())
    if n_valid < MIN_CALIBRATION_FRAMES:
        raise CalibrationError(
            f"insufficient calibration signal: {n_valid} valid frames, "
            f"need {MIN_CALIBRATION_FRAMES}"
        )
    offset = float(np.median(it.nasal_db[valid] - it.oral_db[valid]))
    return CalibrationProfile(
        gain_offset_db=offset,
        created_from=rec.source_id,
        stimulus_window=(float(window[0]), float(window[1])),
    )


def apply_calibration(it: IntensityTrack, profile: CalibrationProfile) -> IntensityTrack:
    """Reduce every nasal frame by the profile's offset; oral and times untouched."""
    return shift_nasal_db(it, -profile.gain_offset_db)


def save_profile(profile: CalibrationProfile, path) -> None:
    """Persist a profile as a small JSON document."""
    doc = {
        "gain_offset_db": profile.gain_offset_db,
        "created_from": profile.created_from,
        "stimulus_window": list(profile.stimulus_window),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_profile(path) -> CalibrationProfile:
    """Load a profile written by save_profile."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
        window = doc.get("stimulus_window", [0.0, 0.0])
        return CalibrationProfile(
            gain_offset_db=float(doc["gain_offset_db"]),
            created_from=str(doc.get("created_from", "")),
            stimulus_window=(float(window[0]), float(window[1])),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputFormatError(f"{path.name}: bad calibration profile: {exc}") from exc
