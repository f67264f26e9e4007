"""The whole command-line workflow in a scratch directory.

synth renders fixtures for two pretend recording systems, analyze turns
each WAV + TextGrid + wordlist into a token CSV, and stats fits the
contrast model over the merged tokens.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

from nasalance import serialize_textgrid
from nasalance.textgrid import Interval, IntervalTier


def cli(*args):
    print("$ nasalance " + " ".join(str(a) for a in args))
    proc = subprocess.run([sys.executable, "-m", "nasalance", *map(str, args)],
                          capture_output=True, text=True)
    if proc.stderr.strip():
        print("  " + proc.stderr.strip().replace("\n", "\n  "))
    proc.check_returncode()
    return proc


def spec_for(targets):
    seg, ramp, amp = 0.25, 0.004, 0.5
    nasal, oral = [], []
    for k, pct in enumerate(targets):
        t0, t1 = k * seg + (ramp if k else 0.0), (k + 1) * seg - ramp
        nasal += [(t0, amp * pct / 100), (t1, amp * pct / 100)]
        oral += [(t0, amp * (1 - pct / 100)), (t1, amp * (1 - pct / 100))]
    return {
        "duration_s": seg * len(targets), "sample_rate": 48000,
        "carrier": {"type": "sine", "f_hz": 440.0},
        "nasal_env": nasal, "oral_env": oral,
        "bleed": 0.0, "noise_rms": 0.0, "seed": 0,
    }


words = [("bin", "IH1"), ("bid", "IH1"), ("men", "EH1"), ("med", "EH1")]
phone_ivs, word_ivs = [], []
for k, (word, vowel) in enumerate(words):
    t0, t1 = k * 0.25, (k + 1) * 0.25
    phone_ivs += [Interval(t0, t0 + 0.1, "sil"), Interval(t0 + 0.1, t0 + 0.15, vowel),
                  Interval(t0 + 0.15, t1, "sil")]
    word_ivs.append(Interval(t0, t1, word))
tiers = [IntervalTier("phone", 0.0, 1.0, tuple(phone_ivs)),
         IntervalTier("word", 0.0, 1.0, tuple(word_ivs))]

with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp)
    (root / "align.TextGrid").write_text(serialize_textgrid(tiers))
    (root / "words.csv").write_text(
        "word,vowel,environment\nbin,KIT,nasal\nbid,KIT,oral\n"
        "men,DRESS,nasal\nmed,DRESS,oral\n"
    )
    token_files = []
    for system, targets in (("icspeech", [70, 40, 65, 35]),
                            ("nosey", [78, 48, 73, 43])):
        (root / f"{system}.json").write_text(json.dumps(spec_for(targets)))
        cli("synth", root / f"{system}.json", "--out", root / system)
        tokens = root / f"{system}.tokens.csv"
        cli("analyze", root / f"{system}.wav", root / "align.TextGrid",
            "--wordlist", root / "words.csv", "--speaker", "sp1",
            "--system", system, "--out", tokens)
        token_files.append(tokens)

    lines = token_files[0].read_text().splitlines()
    for extra in token_files[1:]:
        lines += extra.read_text().splitlines()[1:]
    (root / "all.csv").write_text("\n".join(lines) + "\n")

    cli("stats", root / "all.csv", "--out", root / "results.csv")
    print("\nmerged tokens:")
    print((root / "all.csv").read_text())
    print("contrast results:")
    print((root / "results.csv").read_text())
