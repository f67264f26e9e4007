"""Synthetic two-channel recordings with analytically known nasalance.

Both channels share one carrier scaled by piecewise-linear envelopes, with
optional coherent cross-bleed and per-channel white noise. Coherent bleed
(same carrier in both channels) is the worst case for separation and keeps
the ground truth exact:

    emitted nasal = (a_n + b*a_o) * c(t)
    emitted oral  = (a_o + b*a_n) * c(t)
    truth = 100 * (a_n + b*a_o) / ((a_n + b*a_o) + (a_o + b*a_n))

Everything is deterministic given the spec (the noise seed is part of it).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio_io import StereoRecording
from .errors import SynthSpecError


@dataclass(frozen=True)
class SineCarrier:
    f_hz: float


@dataclass(frozen=True)
class HarmonicCarrier:
    f0_hz: float
    n_partials: int


@dataclass(frozen=True)
class GroundTruth:
    """Expected nasalance percentages at chosen times."""

    times: np.ndarray
    expected_nasalance_pct: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        pct = np.asarray(self.expected_nasalance_pct, dtype=np.float64)
        if len(times) != len(pct):
            raise ValueError("times and values must have equal length")
        if len(pct) and (np.min(pct) < 0.0 or np.max(pct) > 100.0):
            raise ValueError("expected nasalance outside [0, 100]")
        times.flags.writeable = False
        pct.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "expected_nasalance_pct", pct)


def _validate_envelope(env, name):
    env = tuple((float(t), float(a)) for t, a in env)
    if not env:
        raise SynthSpecError(f"{name} has no breakpoints")
    times = [t for t, _ in env]
    if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
        raise SynthSpecError(f"{name} breakpoints must be strictly increasing")
    if any(a < 0 for _, a in env):
        raise SynthSpecError(f"{name} amplitudes must be non-negative")
    return env


@dataclass(frozen=True)
class SynthSpec:
    duration_s: float
    sample_rate: float
    carrier: SineCarrier | HarmonicCarrier
    nasal_env: tuple
    oral_env: tuple
    bleed: float = 0.0
    noise_rms: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.duration_s <= 0:
            raise SynthSpecError(f"duration_s must be > 0, got {self.duration_s}")
        if self.sample_rate <= 0:
            raise SynthSpecError(f"sample_rate must be > 0, got {self.sample_rate}")
        nyquist = self.sample_rate / 2.0
        if isinstance(self.carrier, SineCarrier):
            if not 0 < self.carrier.f_hz < nyquist:
                raise SynthSpecError(f"carrier frequency {self.carrier.f_hz} Hz "
                                     f"outside (0, {nyquist:g})")
        elif isinstance(self.carrier, HarmonicCarrier):
            if not 0 < self.carrier.f0_hz < nyquist:
                raise SynthSpecError(f"carrier f0 {self.carrier.f0_hz} Hz "
                                     f"outside (0, {nyquist:g})")
            if self.carrier.n_partials < 1:
                raise SynthSpecError("carrier needs at least one partial")
        else:
            raise SynthSpecError(f"unknown carrier {self.carrier!r}")
        if not 0 <= self.bleed < 1:
            raise SynthSpecError(f"bleed must be in [0, 1), got {self.bleed}")
        if self.noise_rms < 0:
            raise SynthSpecError(f"noise_rms must be >= 0, got {self.noise_rms}")
        object.__setattr__(self, "nasal_env",
                           _validate_envelope(self.nasal_env, "nasal_env"))
        object.__setattr__(self, "oral_env",
                           _validate_envelope(self.oral_env, "oral_env"))


def _envelope_at(env, times):
    bp_t = np.array([t for t, _ in env])
    bp_a = np.array([a for _, a in env])
    return np.interp(times, bp_t, bp_a)


def _carrier_samples(carrier, t, sample_rate):
    if isinstance(carrier, SineCarrier):
        raw = np.sin(2.0 * np.pi * carrier.f_hz * t)
    else:
        raw = np.zeros_like(t)
        for k in range(1, carrier.n_partials + 1):
            f = k * carrier.f0_hz
            if f >= sample_rate / 2.0:
                break
            raw += np.sin(2.0 * np.pi * f * t) / k
    rms = np.sqrt(np.mean(raw * raw))
    if rms <= 0:
        raise SynthSpecError("carrier is silent")
    return raw / rms  # unit RMS over the actual duration


def expected_nasalance(spec: SynthSpec, times) -> np.ndarray:
    """Analytic nasalance of the bleed model at given times; NaN where both
    emitted envelopes are zero."""
    times = np.asarray(times, dtype=np.float64)
    a_n = _envelope_at(spec.nasal_env, times)
    a_o = _envelope_at(spec.oral_env, times)
    mix_n = a_n + spec.bleed * a_o
    mix_o = a_o + spec.bleed * a_n
    total = mix_n + mix_o
    with np.errstate(invalid="ignore", divide="ignore"):
        pct = np.where(total > 0, 100.0 * mix_n / total, np.nan)
    return pct


def ground_truth(spec: SynthSpec, times) -> GroundTruth:
    """GroundTruth at the given times, dropping times where it is undefined."""
    times = np.asarray(times, dtype=np.float64)
    pct = expected_nasalance(spec, times)
    keep = np.isfinite(pct)
    return GroundTruth(times=times[keep], expected_nasalance_pct=pct[keep])


def synthesize(spec: SynthSpec, truth_times=None) -> tuple[StereoRecording, GroundTruth]:
    """Render the spec to a recording plus its ground truth.

    truth_times defaults to a millisecond grid. The nasal noise stream is
    drawn before the oral one; that order is part of the reproducibility
    contract.
    """
    n = int(round(spec.duration_s * spec.sample_rate))
    if n < 1:
        raise SynthSpecError("spec is shorter than one sample")
    t = np.arange(n) / spec.sample_rate
    c = _carrier_samples(spec.carrier, t, spec.sample_rate)
    a_n = _envelope_at(spec.nasal_env, t)
    a_o = _envelope_at(spec.oral_env, t)
    nasal = (a_n + spec.bleed * a_o) * c
    oral = (a_o + spec.bleed * a_n) * c
    if spec.noise_rms > 0:
        rng = np.random.default_rng(spec.seed)
        nasal = nasal + spec.noise_rms * rng.standard_normal(n)
        oral = oral + spec.noise_rms * rng.standard_normal(n)
    peak = max(np.max(np.abs(nasal)), np.max(np.abs(oral)))
    if peak > 1.0:
        raise SynthSpecError(f"spec clips: peak amplitude {peak:.4f} > 1")
    rec = StereoRecording(
        nasal=nasal, oral=oral, sample_rate=spec.sample_rate, source_id="synth"
    )
    if truth_times is None:
        truth_times = np.arange(0.0, spec.duration_s, 0.001)
    return rec, ground_truth(spec, truth_times)


def truth_to_csv(gt: GroundTruth) -> str:
    """CSV dump with columns t_s,expected_nasalance_pct at 6 decimal places."""
    lines = ["t_s,expected_nasalance_pct"]
    for t, v in zip(gt.times, gt.expected_nasalance_pct):
        lines.append(f"{t:.6f},{v:.6f}")
    return "\n".join(lines) + "\n"


def _carrier_from_dict(doc):
    kind = doc.get("type")
    if kind == "sine":
        return SineCarrier(f_hz=float(doc["f_hz"]))
    if kind == "harmonic":
        return HarmonicCarrier(
            f0_hz=float(doc["f0_hz"]), n_partials=int(doc["n_partials"])
        )
    raise SynthSpecError(f"unknown carrier type {kind!r}")


def spec_from_dict(doc: dict) -> SynthSpec:
    """Build a SynthSpec from a parsed JSON document."""
    try:
        return SynthSpec(
            duration_s=float(doc["duration_s"]),
            sample_rate=float(doc["sample_rate"]),
            carrier=_carrier_from_dict(doc["carrier"]),
            nasal_env=[(float(t), float(a)) for t, a in doc["nasal_env"]],
            oral_env=[(float(t), float(a)) for t, a in doc["oral_env"]],
            bleed=float(doc.get("bleed", 0.0)),
            noise_rms=float(doc.get("noise_rms", 0.0)),
            seed=int(doc.get("seed", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SynthSpecError(f"bad synthesis spec: {exc}") from exc


def load_synth_spec(path) -> SynthSpec:
    """Load a JSON synthesis spec file."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SynthSpecError(f"{path.name}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SynthSpecError(f"{path.name}: spec must be a JSON object")
    return spec_from_dict(doc)
