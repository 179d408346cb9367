"""Variable-length symbol codes and their two-sided shift extensions.

A finitary code maps each source symbol to a non-empty target word.  Its
extension codes a two-sided source path by concatenating codewords with the
convention that the codeword of the symbol at source coordinate 1 starts at
target coordinate 1 (so codewords of coordinates <= 0 stack leftward and end
at 0).

Two code families admit exact bookkeeping and are used by the exact transport
engines:

* comma-separated: codeword = word + separator, the separator appearing
  nowhere else.  The parse boundary after target coordinate p is equivalent
  to the separator sitting at p.
* comma-embedded: codeword = word + separator + suffix with all suffixes of
  one fixed length n; the boundary after p is equivalent to the separator
  sitting at p - n.

The unary family (codeword of x is 0^x 1) is the comma-separated special case
used to carry recurrence-time laws.  Anything else is 'generic': it still
gets unique-decodability and self-avoidance checking, but the exact
quasi-period accounting refuses it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .core import Alphabet, CylinderEvent, Window, Word
from .errors import (
    CodeConstructionError,
    NonCanonicalCylinderError,
    UnknownSymbolError,
    UnsupportedKindError,
    WindowTooShortError,
)

__all__ = [
    "FinitaryCode",
    "CodedWindow",
    "UDVerdict",
    "SelfAvoidWitness",
    "SelfAvoidVerdict",
    "make_comma_separated",
    "make_comma_embedded",
    "make_unary",
    "make_generic",
    "encode",
    "quasi_period",
    "quasi_period_bounded",
    "spread",
    "check_unique_decodability",
    "check_self_avoiding",
    "factorization_commutes",
]

EXACT_KINDS = ("comma_separated", "comma_embedded", "unary")


@dataclass(frozen=True)
class FinitaryCode:
    """A code table from a source alphabet into target words.

    ``codewords[x]`` is the target-id tuple for source id x.  ``separator``
    and ``suffix_len`` are set for the comma classes and None for generic
    codes.
    """

    source: Alphabet
    target: Alphabet
    kind: str
    codewords: tuple[tuple[int, ...], ...]
    separator: int | None = None
    suffix_len: int | None = None

    def __post_init__(self):
        if self.kind not in EXACT_KINDS + ("generic",):
            raise CodeConstructionError(f"unknown code kind {self.kind!r}")
        if len(self.codewords) != self.source.size:
            raise CodeConstructionError("one codeword per source symbol required")
        for cw in self.codewords:
            if len(cw) == 0:
                raise CodeConstructionError("codewords must be non-empty")
            for t in cw:
                if not 0 <= t < self.target.size:
                    raise CodeConstructionError("codeword uses out-of-alphabet id")
        if len(set(self.codewords)) != len(self.codewords):
            raise CodeConstructionError("code table must be injective")
        if self.kind in EXACT_KINDS:
            self._validate_comma()

    def _validate_comma(self):
        c = self.separator
        n = self.suffix_len
        if c is None or n is None:
            raise CodeConstructionError("comma classes need separator and suffix_len")
        if self.kind in ("comma_separated", "unary") and n != 0:
            raise CodeConstructionError("comma-separated codes have suffix_len 0")
        for cw in self.codewords:
            if len(cw) < n + 1:
                raise CodeConstructionError("codeword shorter than separator + suffix")
            sep_at = len(cw) - 1 - n
            if cw[sep_at] != c:
                raise CodeConstructionError(
                    "separator must sit exactly suffix_len before the codeword end"
                )
            if any(t == c for i, t in enumerate(cw) if i != sep_at):
                raise CodeConstructionError("separator occurs inside a codeword")

    # -- plain accessors -------------------------------------------------

    def codeword(self, x: int) -> tuple[int, ...]:
        if not 0 <= x < self.source.size:
            raise UnknownSymbolError(f"source id {x} out of range")
        return self.codewords[x]

    def length(self, x: int) -> int:
        return len(self.codeword(x))

    @property
    def max_len(self) -> int:
        return max(len(cw) for cw in self.codewords)

    @property
    def exact_quasi_period(self) -> bool:
        return self.kind in EXACT_KINDS

    def word_part(self, x: int) -> tuple[int, ...]:
        """The separator-free word before the separator (comma classes)."""
        self._require_exact("word_part")
        cw = self.codewords[x]
        return cw[: len(cw) - 1 - self.suffix_len]

    def suffix_part(self, x: int) -> tuple[int, ...]:
        self._require_exact("suffix_part")
        cw = self.codewords[x]
        return cw[len(cw) - self.suffix_len :]

    def boundary_event(self) -> CylinderEvent:
        """Cylinder equivalent to 'a codeword ends at coordinate 0'."""
        self._require_exact("boundary_event")
        return CylinderEvent(
            self.target, -self.suffix_len, Word(self.target, (self.separator,))
        )

    def source_id_of_codeword(self, cw: tuple[int, ...]) -> int | None:
        try:
            return self.codewords.index(cw)
        except ValueError:
            return None

    def _require_exact(self, opname: str):
        if not self.exact_quasi_period:
            raise UnsupportedKindError(
                f"{opname} requires a comma-class code, got kind {self.kind!r}"
            )

    def arrays(self):
        """Flattened codeword table (flat, offsets, lengths) for the kernels."""
        lens = np.array([len(cw) for cw in self.codewords], dtype=np.int64)
        off = np.concatenate(([0], np.cumsum(lens)[:-1])).astype(np.int64)
        flat = np.array(
            [t for cw in self.codewords for t in cw], dtype=np.int64
        )
        return flat, off, lens

    def describe(self) -> dict:
        d = {
            "kind": self.kind,
            "source": list(self.source.labels),
            "target": list(self.target.labels),
            "codewords": {
                self.source.label_of(x): "".join(
                    self.target.label_of(t) for t in cw
                )
                for x, cw in enumerate(self.codewords)
            },
        }
        if self.separator is not None:
            d["separator"] = self.target.label_of(self.separator)
            d["suffix_len"] = self.suffix_len
        return d


# -- constructors --------------------------------------------------------


def _target_alphabet(labels) -> Alphabet:
    return Alphabet("target", tuple(labels))


def make_comma_separated(
    word_map: dict[str, str], separator: str, target_labels=None
) -> FinitaryCode:
    """Build a comma-separated code from word parts (separator appended)."""
    if target_labels is None:
        seen = {separator}
        for w in word_map.values():
            seen.update(w)
        target_labels = sorted(seen)
    target = _target_alphabet(target_labels)
    source = Alphabet("source", tuple(word_map))
    c = target.id_of(separator)
    cws = []
    for lab, w in word_map.items():
        ids = tuple(target.id_of(ch) for ch in w)
        if c in ids:
            raise CodeConstructionError(f"separator inside word part for {lab!r}")
        cws.append(ids + (c,))
    return FinitaryCode(source, target, "comma_separated", tuple(cws), c, 0)


def make_comma_embedded(
    word_map: dict[str, str],
    separator: str,
    suffix_map: dict[str, str],
    suffix_len: int | None = None,
    target_labels=None,
) -> FinitaryCode:
    """Build a comma-embedded code: codeword = word + separator + suffix."""
    if set(word_map) != set(suffix_map):
        raise CodeConstructionError("word_map and suffix_map must share keys")
    lens = {len(z) for z in suffix_map.values()}
    if len(lens) != 1:
        raise CodeConstructionError("all suffixes must share one length")
    n = lens.pop()
    if suffix_len is not None and suffix_len != n:
        raise CodeConstructionError(
            f"declared suffix length {suffix_len} but suffixes have length {n}"
        )
    if target_labels is None:
        seen = {separator}
        for lab in word_map:
            seen.update(word_map[lab])
            seen.update(suffix_map[lab])
        target_labels = sorted(seen)
    target = _target_alphabet(target_labels)
    source = Alphabet("source", tuple(word_map))
    c = target.id_of(separator)
    cws = []
    for lab in word_map:
        wids = tuple(target.id_of(ch) for ch in word_map[lab])
        zids = tuple(target.id_of(ch) for ch in suffix_map[lab])
        if c in wids or c in zids:
            raise CodeConstructionError(f"separator inside word/suffix for {lab!r}")
        cws.append(wids + (c,) + zids)
    return FinitaryCode(source, target, "comma_embedded", tuple(cws), c, n)


def make_unary(support) -> FinitaryCode:
    """The code x -> 0^x 1 over the given support of non-negative integers."""
    xs = [int(x) for x in support]
    if not xs or any(x < 0 for x in xs):
        raise CodeConstructionError("unary support must be non-negative integers")
    if len(set(xs)) != len(xs):
        raise CodeConstructionError("unary support has duplicates")
    target = _target_alphabet(("0", "1"))
    source = Alphabet("source", tuple(str(x) for x in xs))
    cws = tuple((0,) * x + (1,) for x in xs)
    return FinitaryCode(source, target, "unary", cws, 1, 0)


def make_generic(codewords: dict[str, str], target_labels=None) -> FinitaryCode:
    if target_labels is None:
        seen = set()
        for w in codewords.values():
            seen.update(w)
        target_labels = sorted(seen)
    target = _target_alphabet(target_labels)
    source = Alphabet("source", tuple(codewords))
    cws = tuple(
        tuple(target.id_of(ch) for ch in w) for w in codewords.values()
    )
    return FinitaryCode(source, target, "generic", cws)


# -- encoding ------------------------------------------------------------


@dataclass(frozen=True)
class CodedWindow:
    """An encoded window plus the coordinates where each codeword ends.

    ``boundaries[k]`` is the target coordinate at which the k-th codeword of
    the source window ends; boundary 0 marks the parse point just before the
    window when the source window starts at coordinate 1.
    """

    window: Window
    boundaries: tuple[int, ...]


def encode(code: FinitaryCode, xw: Window) -> CodedWindow:
    """Encode a source window starting at coordinate 1."""
    if xw.alphabet != code.source:
        raise UnknownSymbolError("window alphabet is not the code's source")
    if xw.start != 1:
        raise ValueError("encode expects a source window starting at 1")
    from . import _kernels

    flat, off, lens = code.arrays()
    coded = _kernels.encode_ids(np.asarray(xw.ids, dtype=np.int64), flat, off, lens)
    ends = np.cumsum(lens[xw.ids])
    boundaries = (0,) + tuple(int(e) for e in ends)
    return CodedWindow(Window(code.target, 1, coded), boundaries)


def _coded_stream(code: FinitaryCode, ids) -> np.ndarray:
    from . import _kernels

    flat, off, lens = code.arrays()
    return _kernels.encode_ids(np.asarray(ids, dtype=np.int64), flat, off, lens)


# -- quasi-period and spread ----------------------------------------------


def quasi_period(code: FinitaryCode, x1) -> int:
    """Steps until the coded image of the shifted path realigns.

    Exact for the comma classes, where it equals the length of the codeword
    of the symbol at source coordinate 1; ``x1`` is that symbol (id or
    label).
    """
    code._require_exact("quasi_period")
    if isinstance(x1, str):
        x1 = code.source.id_of(x1)
    return code.length(int(x1))


def quasi_period_bounded(code: FinitaryCode, xw: Window, horizon: int) -> int:
    """Smallest shift l >= 1 whose coded realignment holds through ``horizon``.

    Works for any code kind by brute comparison of the coded streams on
    target coordinates 1..horizon; an upper estimate of the true
    quasi-period, exact when the code class guarantees it.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if xw.start != 1:
        raise ValueError("expects a source window starting at 1")
    lmax = code.length(xw.at(1))
    a = _coded_stream(code, xw.ids)  # coords 1..len(a)
    b = _coded_stream(code, xw.ids[1:])  # coded image of the shifted path
    if len(a) < horizon + lmax or len(b) < horizon:
        raise WindowTooShortError(
            "window too short: need coded cover of horizon + first codeword"
        )
    for l in range(1, lmax + 1):
        if np.array_equal(a[l : l + horizon], b[:horizon]):
            return l
    raise AssertionError("realignment at the first codeword length must match")


def spread(code: FinitaryCode, xw: Window, B: CylinderEvent) -> int:
    """How many of the L shifted copies of the coded path fall in ``B``.

    L is the quasi-period read off the symbol at source coordinate 1; the
    count is over shifts l = 0..L-1 of the coded image.  Always within
    [0, L].
    """
    code._require_exact("spread")
    if B.alphabet != code.target:
        raise ValueError("event alphabet is not the code's target")
    if B.start < 1:
        raise NonCanonicalCylinderError(
            "spread probes target coordinates < 1; canonicalize the event first"
        )
    if xw.start != 1:
        raise ValueError("expects a source window starting at 1")
    L = code.length(xw.at(1))
    coded = _coded_stream(code, xw.ids)  # coords 1..len
    need = B.end + L - 1
    if len(coded) < need:
        raise WindowTooShortError(
            f"coded window covers 1..{len(coded)}, spread needs 1..{need}"
        )
    word = np.asarray(B.word.ids, dtype=np.int64)
    count = 0
    for l in range(L):
        lo = B.start + l - 1  # 0-based offset into coded
        if np.array_equal(coded[lo : lo + len(word)], word):
            count += 1
    return count


# -- unique decodability --------------------------------------------------


@dataclass(frozen=True)
class UDVerdict:
    unique: bool
    witness: Word | None = None
    parses: tuple[tuple[int, ...], tuple[int, ...]] | None = None


def check_unique_decodability(code: FinitaryCode) -> UDVerdict:
    """Dangling-suffix search; on failure returns a minimal ambiguous word.

    The witness carries two distinct source parses of the same target word.
    """
    cws = code.codewords
    # State: dangling suffix d the lagging parse must still produce, plus the
    # two parses so far (lagging side, leading side).  BFS ensures the first
    # accepted witness has minimal codeword count.
    queue: deque = deque()
    seen: set[tuple[int, ...]] = set()
    for a, ca in enumerate(cws):
        for b, cb in enumerate(cws):
            if a == b or len(ca) >= len(cb):
                continue
            if cb[: len(ca)] == ca:
                d = cb[len(ca) :]
                if d not in seen:
                    seen.add(d)
                    queue.append((d, (a,), (b,)))
    while queue:
        d, lag, lead = queue.popleft()
        for s, cs in enumerate(cws):
            if cs == d:
                parses = tuple(sorted((lag + (s,), lead)))
                word_ids = tuple(
                    t for x in parses[0] for t in cws[x]
                )
                return UDVerdict(
                    False, Word(code.target, word_ids), (parses[0], parses[1])
                )
            if len(cs) < len(d) and d[: len(cs)] == cs:
                nd = d[len(cs) :]
                if nd not in seen:
                    seen.add(nd)
                    queue.append((nd, lag + (s,), lead))
            elif len(cs) > len(d) and cs[: len(d)] == d:
                nd = cs[len(d) :]
                if nd not in seen:
                    seen.add(nd)
                    queue.append((nd, lead, lag + (s,)))
    return UDVerdict(True)


# -- self-avoidance -------------------------------------------------------


@dataclass(frozen=True)
class SelfAvoidWitness:
    """A shifted re-parse of a coded stream landing strictly inside a codeword.

    ``left_sources + right_sources`` is the source word (right_sources[0] is
    the symbol whose codeword starts at target coordinate 1 and contains the
    offending boundary at offset ``shift``).  ``reparse_sources`` tile the
    shifted stream as codewords; ``reparse_start`` is the target coordinate
    at which the first tile begins.
    """

    left_sources: tuple[int, ...]
    right_sources: tuple[int, ...]
    shift: int
    reparse_sources: tuple[int, ...]
    reparse_start: int


@dataclass(frozen=True)
class SelfAvoidVerdict:
    passed: bool
    depth: int
    witness: SelfAvoidWitness | None = None


def _overlap_search(cws, init_pending, forward: bool, budget: int):
    """Two-parse overlap search on dangling-text states.

    States are ('A', text): the original parse is mid-codeword and the
    re-parse sits at a boundary, or ('B', text): the re-parse codeword
    sticks out past an original boundary.  ``forward`` matches prefixes
    going right; the backward flavor matches suffixes going left.  Success
    means the overlap can continue forever: an aligned state or a cycle is
    reachable.  Returns (ok, tiles, sources) where tiles are re-parse
    codeword ids in scan order and sources the original-side ids consumed.
    """

    def a_moves(d):
        # re-parse side consumes one codeword v against pending original text d
        for v, cv in enumerate(cws):
            if forward:
                if len(cv) < len(d) and d[: len(cv)] == cv:
                    yield ("A", d[len(cv) :]), v, None
                elif cv == d:
                    yield "ALIGNED", v, None
                elif len(cv) > len(d) and cv[: len(d)] == d:
                    yield ("B", cv[len(d) :]), v, None
            else:
                if len(cv) < len(d) and d[-len(cv) :] == cv:
                    yield ("A", d[: -len(cv)]), v, None
                elif cv == d:
                    yield "ALIGNED", v, None
                elif len(cv) > len(d) and cv[-len(d) :] == d:
                    yield ("B", cv[: -len(d)]), v, None

    def b_moves(e):
        # original side consumes one source codeword u against re-parse text e
        for u, cu in enumerate(cws):
            if forward:
                if len(cu) < len(e) and e[: len(cu)] == cu:
                    yield ("B", e[len(cu) :]), None, u
                elif cu == e:
                    yield "ALIGNED", None, u
                elif len(cu) > len(e) and cu[: len(e)] == e:
                    yield ("A", cu[len(e) :]), None, u
            else:
                if len(cu) < len(e) and e[-len(cu) :] == cu:
                    yield ("B", e[: -len(cu)]), None, u
                elif cu == e:
                    yield "ALIGNED", None, u
                elif len(cu) > len(e) and cu[-len(e) :] == e:
                    yield ("A", cu[: -len(e)]), None, u

    def moves(state):
        side, text = state
        return a_moves(text) if side == "A" else b_moves(text)

    start = ("A", init_pending)
    # BFS recording parent edges and source-consumption depth.
    dist = {start: 0}
    parent = {start: None}
    order = [start]
    queue = deque([start])
    aligned_edge = None
    while queue and aligned_edge is None:
        st = queue.popleft()
        for nxt, v, u in moves(st):
            cost = dist[st] + (1 if u is not None else 0)
            if cost > budget:
                continue
            if nxt == "ALIGNED":
                aligned_edge = (st, v, u)
                break
            if nxt not in dist:
                dist[nxt] = cost
                parent[nxt] = (st, v, u)
                order.append(nxt)
                queue.append(nxt)

    def unwind(state):
        tiles, sources = [], []
        while parent[state] is not None:
            prev, v, u = parent[state]
            if v is not None:
                tiles.append(v)
            if u is not None:
                sources.append(u)
            state = prev
        tiles.reverse()
        sources.reverse()
        return tiles, sources

    if aligned_edge is not None:
        st, v, u = aligned_edge
        tiles, sources = unwind(st)
        if v is not None:
            tiles.append(v)
        if u is not None:
            sources.append(u)
        return True, tiles, sources

    # No aligned overlap: look for a reachable cycle (overlap repeats forever).
    explored = set(dist)
    for node in order:
        # DFS from node back to itself through explored states.
        stack = [(node, [], [], 0)]
        visited = set()
        while stack:
            st, tiles, sources, cost = stack.pop()
            for nxt, v, u in moves(st):
                if nxt == "ALIGNED" or nxt not in explored:
                    continue
                ncost = cost + (1 if u is not None else 0)
                if dist[node] + ncost > budget:
                    continue
                ntiles = tiles + [v] if v is not None else tiles
                nsources = sources + [u] if u is not None else sources
                if nxt == node:
                    head_tiles, head_sources = unwind(node)
                    return True, head_tiles + ntiles, head_sources + nsources
                if nxt not in visited:
                    visited.add(nxt)
                    stack.append((nxt, ntiles, nsources, ncost))
    return False, [], []


def check_self_avoiding(code: FinitaryCode, depth: int = 8) -> SelfAvoidVerdict:
    """Bounded search for a shifted boundary landing inside the code image.

    For each first codeword and each shift 0 < j < L (L the first codeword's
    length), looks for a two-sided re-parse of the coded stream whose
    boundary falls at offset j.  A Pass(depth) only asserts no violation was
    found with at most ``depth`` codewords consumed per side.
    """
    if depth < 2:
        raise ValueError("depth must be >= 2")
    cws = code.codewords
    for u1, cw1 in enumerate(cws):
        for j in range(1, len(cw1)):
            ok_b, tiles_b, src_b = _overlap_search(cws, cw1[:j], False, depth)
            if not ok_b:
                continue
            ok_f, tiles_f, src_f = _overlap_search(cws, cw1[j:], True, depth)
            if not ok_f:
                continue
            # src_b consumed leftward: left neighbors of u1 in scan order
            # u_0, u_-1, ...; store leftmost-first.
            left = tuple(reversed(src_b))
            right = (u1,) + tuple(src_f)
            tiles = tuple(reversed(tiles_b)) + tuple(tiles_f)
            start = j + 1 - sum(len(cws[v]) for v in tiles_b)
            return SelfAvoidVerdict(
                False,
                depth,
                SelfAvoidWitness(left, right, j, tiles, start),
            )
    return SelfAvoidVerdict(True, depth)


def replay_witness(code: FinitaryCode, w: SelfAvoidWitness) -> bool:
    """Check a violation witness at window level.

    Encodes the source word, lays the re-parse tiles from ``reparse_start``,
    and verifies every overlapping coordinate agrees while the shifted
    boundary sits strictly inside the first codeword.
    """
    cws = code.codewords
    L = len(cws[w.right_sources[0]])
    if not 0 < w.shift < L:
        return False
    stream = {}
    pos = 1
    for u in w.right_sources:
        for t in cws[u]:
            stream[pos] = t
            pos += 1
    pos = 0
    for u in reversed(w.left_sources):
        for t in reversed(cws[u]):
            stream[pos] = t
            pos -= 1
    p = w.reparse_start
    covered = False
    for v in w.reparse_sources:
        for t in cws[v]:
            if p in stream:
                covered = True
                if stream[p] != t:
                    return False
            p += 1
    # The tiling must respect the claimed boundary: some tile edge at shift.
    edges = {w.reparse_start - 1}
    p = w.reparse_start - 1
    for v in w.reparse_sources:
        p += len(cws[v])
        edges.add(p)
    return covered and w.shift in edges


# -- stationary-code factorization ----------------------------------------


def factorization_commutes(code: FinitaryCode, xw: Window, steps: int) -> bool:
    """Check the word-level factorization of the code extension on a window.

    Parsing the coded image at its boundary marks recovers the codeword
    sequence; the check verifies (a) parsed words are the original codewords,
    (b) parsing commutes with the shift for 1..steps source steps, and
    (c) concatenating the parsed words reproduces the coded stream.
    """
    code._require_exact("factorization_commutes")
    if xw.start != 1:
        raise ValueError("expects a source window starting at 1")
    if steps < 1 or steps >= len(xw):
        raise ValueError("steps must be in 1..len(window)-1")

    def parse_words(ids):
        coded = _coded_stream(code, ids)
        n = code.suffix_len
        c = code.separator
        # boundary after 0-based position p  <=>  coded[p - n] is the separator
        bounds = [
            p for p in range(1, len(coded) + 1) if p - n >= 1 and coded[p - n - 1] == c
        ]
        words = []
        prev = 0
        for p in bounds:
            words.append(tuple(int(t) for t in coded[prev:p]))
            prev = p
        return words, coded

    base_words, base_coded = parse_words(xw.ids)
    expect = [code.codewords[int(x)] for x in xw.ids]
    if base_words != expect[: len(base_words)] or not base_words:
        return False
    if any(code.source_id_of_codeword(wd) is None for wd in base_words):
        return False
    flat = [t for wd in base_words for t in wd]
    if flat != [int(t) for t in base_coded[: len(flat)]]:
        return False
    for s in range(1, steps + 1):
        shifted_words, _ = parse_words(xw.ids[s:])
        k = min(len(shifted_words), len(base_words) - s)
        if shifted_words[:k] != base_words[s : s + k] or k == 0:
            return False
    return True
