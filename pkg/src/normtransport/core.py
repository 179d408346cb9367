"""Coordinates, windows, and cylinder events on two-sided symbol sequences.

A path window is a finite view of a two-sided sequence (..., x_-1, x_0; x_1,
x_2, ...).  Coordinates are integers; the origin convention places the
"present" boundary between coordinates 0 and 1.  The shift T moves a sequence
one step left, so (T x)_i = x_{i+1}.

A cylinder event pins a finite word at consecutive coordinates.  Event shifts
and window shifts are inverse bookkeeping for the same T, which is the only
identity the rest of the package relies on:

    matches(shift_window(p, j), shift_event(c, -j)) == matches(p, c)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RangeNotCoveredError, UnknownSymbolError

__all__ = [
    "Alphabet",
    "Symbol",
    "Word",
    "Window",
    "CylinderEvent",
    "shift_window",
    "shift_event",
    "matches",
]


@dataclass(frozen=True)
class Symbol:
    """A single alphabet symbol: dense integer id plus display label."""

    id: int
    label: str


@dataclass(frozen=True)
class Alphabet:
    """Finite ordered alphabet with a role tag ('source', 'target' or 'word')."""

    tag: str
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("alphabet labels must be distinct")
        if not self.labels:
            raise ValueError("alphabet must be non-empty")

    @property
    def size(self) -> int:
        return len(self.labels)

    def symbols(self) -> tuple[Symbol, ...]:
        return tuple(Symbol(i, lab) for i, lab in enumerate(self.labels))

    def id_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownSymbolError(
                f"label {label!r} not in {self.tag} alphabet {self.labels}"
            ) from None

    def label_of(self, sym_id: int) -> str:
        if not 0 <= sym_id < len(self.labels):
            raise UnknownSymbolError(f"symbol id {sym_id} out of range")
        return self.labels[sym_id]

    def word(self, labels) -> "Word":
        """Build a Word from an iterable of labels (or a label string)."""
        return Word(self, tuple(self.id_of(ch) for ch in labels))


def ints(values) -> tuple[int, ...]:
    return tuple(int(v) for v in values)


@dataclass(frozen=True)
class Word:
    """A finite word over an alphabet, stored as symbol ids."""

    alphabet: Alphabet
    ids: tuple[int, ...]

    def __post_init__(self):
        for i in self.ids:
            if not 0 <= i < self.alphabet.size:
                raise UnknownSymbolError(f"symbol id {i} out of range")

    def __len__(self) -> int:
        return len(self.ids)

    def labels(self) -> str:
        return " ".join(self.alphabet.label_of(i) for i in self.ids)

    def render(self) -> str:
        return "".join(self.alphabet.label_of(i) for i in self.ids)


def _as_idarray(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError("window contents must be one-dimensional")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Window:
    """Finite view of a two-sided path: symbols at coordinates start..end."""

    alphabet: Alphabet
    start: int
    ids: np.ndarray = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "ids", _as_idarray(self.ids))
        if len(self.ids) and (
            self.ids.min() < 0 or self.ids.max() >= self.alphabet.size
        ):
            raise UnknownSymbolError("window contains out-of-alphabet ids")

    def __len__(self) -> int:
        return len(self.ids)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Window):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and self.start == other.start
            and np.array_equal(self.ids, other.ids)
        )

    @property
    def end(self) -> int:
        return self.start + len(self.ids) - 1

    def covers(self, lo: int, hi: int) -> bool:
        """Whether coordinates lo..hi (inclusive) all lie inside the window."""
        return self.start <= lo and hi <= self.end

    def at(self, coord: int) -> int:
        if not self.covers(coord, coord):
            raise RangeNotCoveredError(
                f"coordinate {coord} outside window [{self.start}, {self.end}]"
            )
        return int(self.ids[coord - self.start])

    def segment(self, lo: int, hi: int) -> np.ndarray:
        """Symbols at coordinates lo..hi inclusive."""
        if not self.covers(lo, hi):
            raise RangeNotCoveredError(
                f"range [{lo}, {hi}] outside window [{self.start}, {self.end}]"
            )
        return self.ids[lo - self.start : hi - self.start + 1]

    def render(self) -> str:
        body = " ".join(self.alphabet.label_of(int(i)) for i in self.ids)
        return f"{self.start}:{body}"

    @classmethod
    def from_labels(cls, alphabet: Alphabet, start: int, labels) -> "Window":
        return cls(alphabet, start, [alphabet.id_of(ch) for ch in labels])


@dataclass(frozen=True)
class CylinderEvent:
    """The event 'the word sits at coordinates start..start+len-1'."""

    alphabet: Alphabet
    start: int
    word: Word

    def __post_init__(self):
        if len(self.word) == 0:
            raise ValueError("cylinder word must be non-empty")
        if self.word.alphabet != self.alphabet:
            raise ValueError("cylinder word alphabet mismatch")

    def __len__(self) -> int:
        return len(self.word)

    @property
    def end(self) -> int:
        return self.start + len(self.word) - 1

    def render(self) -> str:
        return f"[{self.start}|{self.word.render()}]"

    @classmethod
    def from_labels(cls, alphabet: Alphabet, start: int, labels) -> "CylinderEvent":
        return cls(alphabet, start, alphabet.word(labels))


def shift_window(pw: Window, j: int) -> Window:
    """Window of T^j applied to the underlying path: start decreases by j.

    The symbol that sat at coordinate i is found at coordinate i - j of the
    shifted path, since (T^j x)_{i-j} = x_i.
    """
    return Window(pw.alphabet, pw.start - j, pw.ids)


def shift_event(c: CylinderEvent, j: int) -> CylinderEvent:
    """The event {x : T^j x in c}; the pinned word moves right by j."""
    return CylinderEvent(c.alphabet, c.start + j, c.word)


def matches(pw: Window, c: CylinderEvent) -> bool:
    """Whether the path seen through ``pw`` lies in the cylinder ``c``.

    Raises RangeNotCoveredError when the window does not determine the event.
    """
    if pw.alphabet != c.alphabet:
        raise ValueError("window/event alphabet mismatch")
    seg = pw.segment(c.start, c.end)
    return bool(np.array_equal(seg, np.asarray(c.word.ids, dtype=np.int64)))
