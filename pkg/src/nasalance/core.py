"""Per-frame nasalance from an intensity track, and sampling at arbitrary times.

Nasalance is the nasal share of total acoustic amplitude as a percentage:
100 * a_n / (a_n + a_o). Values are computed from the inter-channel dB
difference with the smaller channel in the numerator, which makes two
properties hold bitwise rather than approximately: swapping the channels
maps N to 100 - N, and adding the same constant to both dB tracks (an
intensity reference change) does not move N at all.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UndefinedFrameError, UnmeasurableError
from .intensity import DB_CLAMP_FLOOR, IntensityTrack


@dataclass(frozen=True)
class NasalanceTrack:
    """Per-frame nasalance percentage with validity flags.

    Invalid frames (both channels at/below the silence floor) carry NaN and
    must never be averaged in.
    """

    times: np.ndarray
    nasalance_pct: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        pct = np.asarray(self.nasalance_pct, dtype=np.float64)
        valid = np.asarray(self.valid, dtype=bool)
        if not len(times) == len(pct) == len(valid):
            raise ValueError("times, nasalance_pct, valid must have equal length")
        ok = pct[valid]
        if len(ok) and (np.min(ok) < 0.0 or np.max(ok) > 100.0):
            raise ValueError("valid nasalance values outside [0, 100]")
        for arr in (times, pct, valid):
            arr.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "nasalance_pct", pct)
        object.__setattr__(self, "valid", valid)

    def __len__(self) -> int:
        return len(self.times)


def nasalance_frame(a_n: float, a_o: float) -> float:
    """Nasalance percentage from linear nasal/oral amplitudes.

    Raises UndefinedFrameError when both amplitudes are zero; callers turn
    that into an invalid frame.
    """
    if a_n < 0 or a_o < 0:
        raise ValueError(f"amplitudes must be non-negative, got ({a_n}, {a_o})")
    total = a_n + a_o
    if total <= 0:
        raise UndefinedFrameError("both channel amplitudes are zero")
    # smaller channel in the numerator so a swap yields exactly 100 - N
    if a_n <= a_o:
        return 100.0 * (a_n / total)
    return 100.0 - 100.0 * (a_o / total)


def nasalance_track(it: IntensityTrack, mode: str = "amplitude") -> NasalanceTrack:
    """Apply the nasalance ratio to every frame of an intensity track.

    A frame is valid iff at least one channel is above the configured
    silence floor. mode="power" squares the amplitudes in the ratio; the
    default ratio is of linear RMS amplitudes.
    """
    if mode not in ("amplitude", "power"):
        raise ValueError(f"unknown mode {mode!r}")
    db_per_decade = 20.0 if mode == "amplitude" else 10.0
    nasal, oral = it.nasal_db, it.oral_db
    floor = it.config.silence_floor_db
    valid = (np.maximum(nasal, oral) > floor) & (
        (nasal > DB_CLAMP_FLOOR) | (oral > DB_CLAMP_FLOOR)
    )
    diff = nasal - oral
    r = np.power(10.0, -np.abs(diff) / db_per_decade)
    larger = 100.0 - 100.0 * (r / (r + 1.0))
    # 100 - larger is exact (Sterbenz), so complementary frames pair up
    # bitwise under a channel swap; costs at most 7e-15 pp
    smaller = 100.0 - larger
    pct = np.where(diff <= 0, smaller, larger)
    # a channel clamped to the floor is exactly silent, not 1e-15
    pct = np.where(nasal <= DB_CLAMP_FLOOR, 0.0, pct)
    pct = np.where(oral <= DB_CLAMP_FLOOR, 100.0, pct)
    pct = np.where(valid, pct, np.nan)
    return NasalanceTrack(times=it.times, nasalance_pct=pct, valid=valid)


def _nearest_index(times: np.ndarray, t: float) -> int:
    right = int(np.searchsorted(times, t))
    if right == 0:
        return 0
    if right == len(times):
        return len(times) - 1
    left = right - 1
    # ties break toward the earlier frame
    if t - times[left] <= times[right] - t:
        return left
    return right


def value_at(nt: NasalanceTrack, t: float, method: str = "nearest") -> float:
    """Nasalance at time t by nearest-frame lookup or linear interpolation.

    Raises UnmeasurableError when t falls outside the track or when the
    frame(s) needed are invalid.
    """
    times = nt.times
    if len(times) == 0 or t < times[0] or t > times[-1]:
        raise UnmeasurableError(t, reason="outside-track")
    if method == "nearest":
        i = _nearest_index(times, t)
        if not nt.valid[i]:
            raise UnmeasurableError(t, reason="invalid-frame")
        return float(nt.nasalance_pct[i])
    if method == "linear":
        right = int(np.searchsorted(times, t))
        if right < len(times) and times[right] == t:
            if not nt.valid[right]:
                raise UnmeasurableError(t, reason="invalid-frame")
            return float(nt.nasalance_pct[right])
        left = right - 1
        if not (nt.valid[left] and nt.valid[right]):
            raise UnmeasurableError(t, reason="invalid-frame")
        t0, t1 = times[left], times[right]
        v0, v1 = nt.nasalance_pct[left], nt.nasalance_pct[right]
        return float(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
    raise ValueError(f"unknown method {method!r}")


def nasalance_to_csv(nt: NasalanceTrack) -> str:
    """CSV dump with columns t_s,nasalance_pct,valid; invalid rows leave
    the value field empty."""
    lines = ["t_s,nasalance_pct,valid"]
    for t, v, ok in zip(nt.times, nt.nasalance_pct, nt.valid):
        value = f"{v:.6f}" if ok else ""
        lines.append(f"{t:.6f},{value},{1 if ok else 0}")
    return "\n".join(lines) + "\n"
