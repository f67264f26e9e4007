"""Parsing a forced-alignment TextGrid and picking vowel tokens.

Builds a small annotation in memory, serializes it the way Praat would,
parses it back, and selects the vowel midpoints that the analyze command
would measure.
"""

from nasalance import parse_textgrid, select_vowel_tokens, serialize_textgrid
from nasalance.textgrid import Interval, IntervalTier

phones = IntervalTier("phone", 0.0, 1.0, (
    Interval(0.00, 0.15, "sil"),
    Interval(0.15, 0.25, "B"),
    Interval(0.25, 0.40, "IH1"),
    Interval(0.40, 0.55, "N"),
    Interval(0.55, 0.65, "B"),
    Interval(0.65, 0.80, "EH1"),
    Interval(0.80, 0.90, "D"),
    Interval(0.90, 1.00, "sil"),
))
words = IntervalTier("word", 0.0, 1.0, (
    Interval(0.00, 0.15, ""),
    Interval(0.15, 0.55, "bin"),
    Interval(0.55, 0.90, "bed"),
    Interval(0.90, 1.00, ""),
))

text = serialize_textgrid([phones, words])
print("serialized TextGrid header:")
print("\n".join(text.splitlines()[:6]))

tiers = parse_textgrid(text)
assert tiers == [phones, words], "round trip must be lossless"
print("\nround trip: parsed structure identical to the original")

tokens = select_vowel_tokens(tiers[0], tiers[1], {"IH", "EH"})
print("\nselected vowel tokens (stress digits stripped):")
for tok in tokens:
    print(f"  word={tok.word!r:6} vowel={tok.vowel_label} midpoint={tok.midpoint:.3f} s")
