"""Recording + TextGrid + wordlist to per-token nasalance records.

This is the batch path behind the analyze command: frame the recording,
optionally calibrate, compute the nasalance track, select vowel tokens
from the annotation, and sample each token at its midpoint. Tokens that
cannot be measured are collected as rejects with a reason, never dropped.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

from .audio_io import StereoRecording
from .calibration import CalibrationProfile, apply_calibration
from .core import nasalance_track, value_at
from .errors import TokenSchemaError, UnmeasurableError, WordlistError
from .intensity import BandpassSpec, FrameConfig, bandpass, intensity_track
from .stats import TokenRecord
from .textgrid import DEFAULT_VOWEL_LABELS, find_tier, select_vowel_tokens

TOKEN_CSV_HEADER = (
    "source_id", "speaker", "system", "word", "vowel", "environment",
    "t_mid_s", "nasalance_pct",
)
REJECT_CSV_HEADER = TOKEN_CSV_HEADER[:-1] + ("reason",)


@dataclass(frozen=True)
class WordInfo:
    vowel: str
    environment: str


@dataclass(frozen=True)
class RejectRecord:
    """A token that could not be measured, with the reason why."""

    source_id: str
    speaker: str
    system: str
    word: str
    vowel: str
    environment: str
    t_mid_s: float
    reason: str


def load_wordlist(path) -> dict[str, WordInfo]:
    """Read a word,vowel,environment CSV into a lowercase word map."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["word", "vowel", "environment"]:
            raise WordlistError(
                f"{path.name}: expected header word,vowel,environment, got {header}"
            )
        mapping = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise WordlistError(f"{path.name}:{lineno}: expected 3 fields")
            word, vowel, environment = (f.strip() for f in row)
            if not word or not vowel or not environment:
                raise WordlistError(f"{path.name}:{lineno}: empty field")
            key = word.lower()
            if key in mapping:
                raise WordlistError(f"{path.name}:{lineno}: duplicate word {word!r}")
            mapping[key] = WordInfo(vowel=vowel, environment=environment)
    return mapping


def extract_token_records(
    rec: StereoRecording,
    tiers,
    wordlist: dict[str, WordInfo],
    *,
    speaker: str,
    system: str,
    vowel_labels=DEFAULT_VOWEL_LABELS,
    frame_cfg: FrameConfig | None = None,
    bandpass_spec: BandpassSpec | None = None,
    calibration_profile: CalibrationProfile | None = None,
    method: str = "nearest",
) -> tuple[list[TokenRecord], list[RejectRecord]]:
    """Measure nasalance at each vowel token midpoint.

    Returns (records, rejects); every selected token lands in exactly one
    of the two lists.
    """
    frame_cfg = frame_cfg or FrameConfig()
    if bandpass_spec is not None:
        rec = bandpass(rec, bandpass_spec)
    it = intensity_track(rec, frame_cfg)
    if calibration_profile is not None:
        it = apply_calibration(it, calibration_profile)
    nt = nasalance_track(it)

    phone_tier = find_tier(tiers, "phone")
    word_tier = find_tier(tiers, "word")
    tokens = select_vowel_tokens(phone_tier, word_tier, vowel_labels)

    records, rejects = [], []
    for token in tokens:
        info = wordlist.get(token.word.lower()) if token.word else None
        vowel = info.vowel if info else token.vowel_label
        environment = info.environment if info else ""

        def _reject(reason):
            rejects.append(
                RejectRecord(
                    source_id=rec.source_id, speaker=speaker, system=system,
                    word=token.word, vowel=vowel, environment=environment,
                    t_mid_s=token.midpoint, reason=reason,
                )
            )

        if token.in_empty_word:
            _reject("empty word interval")
            continue
        if info is None:
            _reject("unmapped word")
            continue
        try:
            value = value_at(nt, token.midpoint, method=method)
        except UnmeasurableError as exc:
            _reject(
                "midpoint outside track"
                if exc.reason == "outside-track"
                else "unmeasurable at midpoint"
            )
            continue
        records.append(
            TokenRecord(
                source_id=rec.source_id, speaker=speaker, system=system,
                word=token.word, vowel=info.vowel, environment=info.environment,
                t_mid_s=token.midpoint, nasalance_pct=value,
            )
        )
    return records, rejects


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def tokens_to_csv(records) -> str:
    """Token CSV with the documented schema; fixed 6-decimal floats."""
    rows = [
        (r.source_id, r.speaker, r.system, r.word, r.vowel, r.environment,
         f"{r.t_mid_s:.6f}", f"{r.nasalance_pct:.6f}")
        for r in records
    ]
    return _csv_text(TOKEN_CSV_HEADER, rows)


def rejects_to_csv(rejects) -> str:
    """Sidecar CSV for unmeasurable tokens, with a reason column."""
    rows = [
        (r.source_id, r.speaker, r.system, r.word, r.vowel, r.environment,
         f"{r.t_mid_s:.6f}", r.reason)
        for r in rejects
    ]
    return _csv_text(REJECT_CSV_HEADER, rows)


def read_token_csv(path) -> list[TokenRecord]:
    """Read a token CSV back; the header row is mandatory."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != TOKEN_CSV_HEADER:
            raise TokenSchemaError(
                f"{path.name}: expected header {','.join(TOKEN_CSV_HEADER)}, "
                f"got {header}"
            )
        records = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(TOKEN_CSV_HEADER):
                raise TokenSchemaError(
                    f"{path.name}:{lineno}: expected {len(TOKEN_CSV_HEADER)} fields"
                )
            try:
                records.append(
                    TokenRecord(
                        source_id=row[0], speaker=row[1], system=row[2],
                        word=row[3], vowel=row[4], environment=row[5],
                        t_mid_s=float(row[6]), nasalance_pct=float(row[7]),
                    )
                )
            except ValueError as exc:
                raise TokenSchemaError(f"{path.name}:{lineno}: {exc}") from exc
    return records
