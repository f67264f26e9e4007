"""Praat TextGrid parsing, serialization, and vowel token selection.

Reads both the long and the short text formats by tokenizing the payload
(numbers, quoted strings, <flags>); long-format key decorations and bracket
indices are skipped as noise, so the two formats parse through one code
path. Writing always emits the long format with 6-decimal times.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .errors import TextGridParseError


class PointTierSkippedWarning(UserWarning):
    """A point tier was present and ignored; it carries no vowel intervals."""


# ARPAbet vowels for the KIT, DRESS, TRAP, STRUT, FACE word classes.
# A configuration default, not a fixed truth; pass your own set as needed.
DEFAULT_VOWEL_LABELS = frozenset({"IH", "EH", "AE", "AH", "EY"})

# structural key words of the long format; anything else unquoted is an error
_KEYWORDS = {
    "File", "type", "Object", "class", "item", "size", "xmin", "xmax",
    "intervals", "points", "text", "name", "number", "mark", "time", "tiers",
}


@dataclass(frozen=True)
class Interval:
    tmin: float
    tmax: float
    label: str

    def __post_init__(self):
        if self.tmin > self.tmax:
            raise ValueError(f"interval with tmin {self.tmin} > tmax {self.tmax}")

    @property
    def midpoint(self) -> float:
        return (self.tmin + self.tmax) / 2.0


@dataclass(frozen=True)
class IntervalTier:
    name: str
    tmin: float
    tmax: float
    intervals: tuple[Interval, ...]

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))
        prev = None
        for iv in self.intervals:
            if prev is not None and iv.tmin != prev.tmax:
                raise ValueError(
                    f"tier {self.name!r}: intervals not contiguous at {prev.tmax}"
                )
            prev = iv
        if self.intervals:
            if self.intervals[0].tmin != self.tmin:
                raise ValueError(f"tier {self.name!r}: first interval not at tier tmin")
            if self.intervals[-1].tmax != self.tmax:
                raise ValueError(f"tier {self.name!r}: last interval not at tier tmax")


@dataclass(frozen=True)
class TokenSelection:
    """One vowel token: containing word, vowel label, interval, midpoint."""

    word: str
    vowel_label: str
    interval: Interval
    midpoint: float
    in_empty_word: bool = False


class _Token:
    __slots__ = ("kind", "value", "line")

    def __init__(self, kind, value, line):
        self.kind = kind  # "num" | "str" | "flag"
        self.value = value
        self.line = line


def _tokenize(text: str):
    """Payload tokens for both TextGrid text formats.

    Bracketed indices (item [3]:) and bare key words carry no payload and
    are skipped; quoted strings may span lines and use doubled quotes for
    embedded quotes.
    """
    tokens = []
    i, line = 0, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            i += 1
        elif c in " \t\r=:!;":
            i += 1
        elif c == '"':
            start_line = line
            i += 1
            parts = []
            while True:
                if i >= n:
                    raise TextGridParseError("unterminated string", line=start_line)
                c = text[i]
                if c == '"':
                    if i + 1 < n and text[i + 1] == '"':
                        parts.append('"')
                        i += 2
                        continue
                    i += 1
                    break
                if c == "\n":
                    line += 1
                parts.append(c)
                i += 1
            tokens.append(_Token("str", "".join(parts), start_line))
        elif c == "[":
            j = text.find("]", i)
            if j < 0:
                raise TextGridParseError("unterminated bracket", line=line)
            line += text.count("\n", i, j)
            i = j + 1
        elif c == "<":
            j = text.find(">", i)
            if j < 0:
                raise TextGridParseError("unterminated flag", line=line)
            tokens.append(_Token("flag", text[i + 1 : j], line))
            i = j + 1
        elif c.isdigit() or c in "+-.":
            j = i
            while j < n and (text[j].isdigit() or text[j] in "+-.eE"):
                j += 1
            word = text[i:j]
            try:
                value = float(word)
            except ValueError:
                raise TextGridParseError(
                    f"non-numeric value {word!r}", line=line
                ) from None
            tokens.append(_Token("num", value, line))
            i = j
        elif c.isalpha() or c in "?_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "?_"):
                j += 1
            word = text[i:j]
            if word.rstrip("?") not in _KEYWORDS:
                raise TextGridParseError(f"unexpected word {word!r}", line=line)
            i = j  # structural key word, carries no payload
        else:
            raise TextGridParseError(f"unexpected character {c!r}", line=line)
    return tokens


class _Stream:
    def __init__(self, tokens):
        self._tokens = tokens
        self._pos = 0

    def exhausted(self) -> bool:
        return self._pos >= len(self._tokens)

    @property
    def last_line(self) -> int:
        if self._tokens:
            return self._tokens[min(self._pos, len(self._tokens) - 1)].line
        return 1

    def _next(self, kind, what):
        if self._pos >= len(self._tokens):
            raise TextGridParseError(f"expected {what}, got end of file",
                                     line=self.last_line)
        tok = self._tokens[self._pos]
        if tok.kind != kind:
            raise TextGridParseError(
                f"expected {what}, got {tok.kind} {tok.value!r}", line=tok.line
            )
        self._pos += 1
        return tok

    def number(self, what) -> tuple[float, int]:
        tok = self._next("num", what)
        return tok.value, tok.line

    def count(self, what) -> tuple[int, int]:
        value, line = self.number(what)
        if value != int(value) or value < 0:
            raise TextGridParseError(f"{what} must be a non-negative integer",
                                     line=line)
        return int(value), line

    def string(self, what) -> tuple[str, int]:
        tok = self._next("str", what)
        return tok.value, tok.line

    def peek_kind(self):
        if self._pos < len(self._tokens):
            return self._tokens[self._pos].kind
        return None

    def flag_or_none(self):
        if self.peek_kind() == "flag":
            tok = self._tokens[self._pos]
            self._pos += 1
            return tok.value
        return None


def decode_textgrid(data: bytes) -> str:
    """Decode TextGrid bytes: UTF-16 (either order, with BOM) or UTF-8."""
    if data[:2] in (b"\xff\xfe", b"\xfe\xff"):
        return data.decode("utf-16")
    return data.decode("utf-8-sig")


def parse_textgrid(text) -> list[IntervalTier]:
    """Parse TextGrid file contents (str or bytes) into interval tiers.

    Point tiers are skipped with a PointTierSkippedWarning; tiers come back
    in file order.
    """
    if isinstance(text, bytes):
        text = decode_textgrid(text)
    stream = _Stream(_tokenize(text))

    file_type, line = stream.string("file type header")
    if file_type != "ooTextFile":
        raise TextGridParseError(f"not an ooTextFile (got {file_type!r})", line=line)
    object_class, line = stream.string("object class header")
    if object_class != "TextGrid":
        raise TextGridParseError(f"not a TextGrid (got {object_class!r})", line=line)
    stream.number("grid xmin")
    stream.number("grid xmax")
    flag = stream.flag_or_none()
    if flag == "absent":
        return []
    if flag != "exists":
        raise TextGridParseError(
            "malformed header: missing tiers? <exists> flag", line=stream.last_line
        )
    n_tiers, _ = stream.count("tier count")

    tiers = []
    for tier_index in range(1, n_tiers + 1):
        tier_class, class_line = stream.string(f"class of tier {tier_index}")
        name, _ = stream.string(f"name of tier {tier_index}")
        tmin, _ = stream.number(f"xmin of tier {name!r}")
        tmax, _ = stream.number(f"xmax of tier {name!r}")
        size, _ = stream.count(f"size of tier {name!r}")
        if tier_class == "IntervalTier":
            intervals = []
            prev_tmax, prev_line = tmin, None
            for j in range(1, size + 1):
                what = f"interval {j} of tier {name!r}"
                imin, l0 = stream.number(f"xmin of {what}")
                imax, l1 = stream.number(f"xmax of {what}")
                label, _ = stream.string(f"text of {what}")
                if imin > imax:
                    raise TextGridParseError(f"{what}: xmin > xmax", line=l0)
                if imin != prev_tmax:
                    raise TextGridParseError(
                        f"{what}: starts at {imin:g}, expected {prev_tmax:g}", line=l0
                    )
                intervals.append(Interval(imin, imax, label))
                prev_tmax, prev_line = imax, l1
            if intervals and intervals[-1].tmax != tmax:
                raise TextGridParseError(
                    f"tier {name!r}: last interval ends at "
                    f"{intervals[-1].tmax:g}, tier ends at {tmax:g}",
                    line=prev_line,
                )
            tiers.append(IntervalTier(name=name, tmin=tmin, tmax=tmax,
                                      intervals=tuple(intervals)))
        elif tier_class == "TextTier":
            for j in range(1, size + 1):
                stream.number(f"time of point {j} in tier {name!r}")
                stream.string(f"mark of point {j} in tier {name!r}")
            warnings.warn(
                f"skipping point tier {name!r}", PointTierSkippedWarning,
                stacklevel=2,
            )
        else:
            raise TextGridParseError(
                f"unknown tier class {tier_class!r}", line=class_line
            )
    if not stream.exhausted():
        raise TextGridParseError(
            "unexpected content after final tier", line=stream.last_line
        )
    return tiers


def read_textgrid(path) -> list[IntervalTier]:
    """Read and parse a TextGrid file from disk."""
    with open(path, "rb") as fh:
        return parse_textgrid(fh.read())


def _quote(label: str) -> str:
    return '"' + label.replace('"', '""') + '"'


def serialize_textgrid(tiers) -> str:
    """Serialize interval tiers to long-format TextGrid text, 6-decimal times."""
    tiers = list(tiers)
    if not tiers:
        raise ValueError("cannot serialize an empty tier list")
    xmin = min(t.tmin for t in tiers)
    xmax = max(t.tmax for t in tiers)
    out = [
        'File type = "ooTextFile"',
        'Object class = "TextGrid"',
        "",
        f"xmin = {xmin:.6f}",
        f"xmax = {xmax:.6f}",
        "tiers? <exists>",
        f"size = {len(tiers)}",
        "item []:",
    ]
    for i, tier in enumerate(tiers, 1):
        out.append(f"    item [{i}]:")
        out.append('        class = "IntervalTier"')
        out.append(f"        name = {_quote(tier.name)}")
        out.append(f"        xmin = {tier.tmin:.6f}")
        out.append(f"        xmax = {tier.tmax:.6f}")
        out.append(f"        intervals: size = {len(tier.intervals)}")
        for j, iv in enumerate(tier.intervals, 1):
            out.append(f"        intervals [{j}]:")
            out.append(f"            xmin = {iv.tmin:.6f}")
            out.append(f"            xmax = {iv.tmax:.6f}")
            out.append(f"            text = {_quote(iv.label)}")
    return "\n".join(out) + "\n"


def find_tier(tiers, role: str) -> IntervalTier:
    """Locate the phone or word tier by name, tolerating case and plurals."""
    wanted = {role.lower(), role.lower() + "s"}
    for tier in tiers:
        if tier.name.lower().strip() in wanted:
            return tier
    raise TextGridParseError(
        f"no {role!r} tier found (tiers: {[t.name for t in tiers]})"
    )


def strip_stress(label: str) -> str:
    """Drop a trailing ARPAbet stress digit (IH1 -> IH)."""
    if label and label[-1] in "012":
        return label[:-1]
    return label


def select_vowel_tokens(
    phone_tier: IntervalTier,
    word_tier: IntervalTier,
    vowel_labels=DEFAULT_VOWEL_LABELS,
) -> list[TokenSelection]:
    """Pick every vowel phone and attach the word containing its midpoint.

    Stress digits are stripped before matching; zero-length and empty-label
    phone intervals are skipped. A vowel whose midpoint lands in an empty
    word interval is flagged, not dropped.
    """
    if (phone_tier.tmin, phone_tier.tmax) != (word_tier.tmin, word_tier.tmax):
        raise ValueError(
            "phone and word tiers span different time ranges: "
            f"[{phone_tier.tmin}, {phone_tier.tmax}] vs "
            f"[{word_tier.tmin}, {word_tier.tmax}]"
        )
    vowel_labels = set(vowel_labels)
    tokens = []
    for iv in phone_tier.intervals:
        label = iv.label.strip()
        if not label or iv.tmax <= iv.tmin:
            continue
        vowel = strip_stress(label)
        if vowel not in vowel_labels:
            continue
        mid = iv.midpoint
        word = ""
        for w in word_tier.intervals:
            if w.tmin <= mid < w.tmax or (mid == w.tmax == word_tier.tmax):
                word = w.label.strip()
                break
        tokens.append(
            TokenSelection(
                word=word,
                vowel_label=vowel,
                interval=iv,
                midpoint=mid,
                in_empty_word=(word == ""),
            )
        )
    return tokens
