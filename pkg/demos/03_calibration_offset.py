"""Why unequal microphone gains inflate nasalance, and how to correct it.

A +2 dB nasal-channel gain raises every nasalance value above its true
level. Estimating the offset from a same-stimulus take and applying the
profile brings the track back within a twentieth of a point.
"""

import numpy as np

from nasalance import (
    StereoRecording,
    apply_calibration,
    estimate_gain_offset,
    intensity_track,
    nasalance_track,
)

sr = 48000
t = np.arange(sr) / sr
carrier = np.sin(2 * np.pi * 220 * t)
clean = StereoRecording(0.25 * carrier, 0.35 * carrier, sr, source_id="clean")
truth = nasalance_track(intensity_track(clean))
print(f"true nasalance: {np.mean(truth.nasalance_pct[truth.valid]):.2f}%")

gain = 10 ** (2.0 / 20.0)  # +2 dB on the nasal microphone
miscalibrated = StereoRecording(gain * 0.25 * carrier, 0.35 * carrier, sr)
inflated = nasalance_track(intensity_track(miscalibrated))
print(f"with +2 dB nasal gain: {np.mean(inflated.nasalance_pct[inflated.valid]):.2f}%")

# calibration take: the same stimulus reaches both microphones
calibration_take = StereoRecording(
    gain * 0.4 * carrier, 0.4 * carrier, sr, source_id="calibration"
)
profile = estimate_gain_offset(calibration_take)
print(f"estimated offset: {profile.gain_offset_db:+.3f} dB (nasal - oral)")

corrected = nasalance_track(
    apply_calibration(intensity_track(miscalibrated), profile)
)
print(f"after correction: {np.mean(corrected.nasalance_pct[corrected.valid]):.2f}%")
worst = np.max(np.abs(corrected.nasalance_pct[truth.valid]
                      - truth.nasalance_pct[truth.valid]))
print(f"worst frame error vs truth: {worst:.4f} percentage points")
