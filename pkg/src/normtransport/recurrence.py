"""Recurrence times, exact return laws, the unary-code bridge, and parsing.

Visit positions of a path to an event are stored absolutely; the stationary
object is the gap sequence between successive visits, available as a view.
Exact laws are computed for iid/markov models; an event is either a set of
states or a fixed word anchored at offset 0 (handled through the standard
block-chain construction).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .codes import encode, make_unary
from .core import Alphabet, CylinderEvent, Window, Word
from .errors import (
    EnumerationBudgetError,
    InsufficientVisitsError,
    NotIrreducibleError,
    RangeNotCoveredError,
    StochasticityError,
    UnsupportedKindError,
)
from .measures import HiddenChain, PathSample, model_digest, sample

__all__ = [
    "EventSet",
    "RecurrenceTrace",
    "recurrence_times",
    "event_prob",
    "kac_expected_return",
    "return_map_invariance",
    "recurrence_joint_law",
    "GapLaw",
    "gap_law_table",
    "exact_block_law",
    "IndicatorModel",
    "BridgeReport",
    "unary_bridge",
    "RecurrenceParse",
    "recurrence_parse",
    "GapStationarityReport",
    "gap_stationarity_report",
    "ExactGapStats",
    "gap_functional_stats",
    "BirkhoffGapAgreement",
    "birkhoff_gap_agreement",
    "sample_recurrence_trace",
    "write_trace",
    "read_trace",
]

_BLOCK_STATE_BUDGET = 50_000
_LAW_STEP_BUDGET = 200_000


# -- events and traces -------------------------------------------------------


class EventSet:
    """Recurrence target: a set of symbols, or a fixed word at offset 0."""

    def __init__(self, kind: str, alphabet: Alphabet, ids=(), event=None):
        if kind not in ("states", "cylinder"):
            raise ValueError("kind must be 'states' or 'cylinder'")
        self.kind = kind
        self.alphabet = alphabet
        self.ids = tuple(sorted(ids))
        self.event = event

    @classmethod
    def from_states(cls, alphabet: Alphabet, symbols) -> "EventSet":
        """Event {coordinate symbol in symbols}; labels or ids accepted."""
        ids = set()
        for s in symbols:
            ids.add(alphabet.id_of(s) if isinstance(s, str) else int(s))
        if not ids:
            raise ValueError("event needs at least one symbol")
        for i in ids:
            alphabet.label_of(i)
        return cls("states", alphabet, ids=ids)

    @classmethod
    def from_event(cls, event: CylinderEvent) -> "EventSet":
        """Event {word appears starting at the current coordinate}."""
        if event.start != 0:
            raise ValueError("recurrence events must be anchored at offset 0")
        return cls("cylinder", event.alphabet, event=event)

    @property
    def pattern_len(self) -> int:
        return 1 if self.kind == "states" else len(self.event.word)

    def visit_positions(self, window: Window) -> np.ndarray:
        """Absolute coordinates p where the shifted event holds on the window."""
        if window.alphabet != self.alphabet:
            raise ValueError("window alphabet does not match the event")
        ids = np.asarray(window.ids, dtype=np.int64)
        if self.kind == "states":
            hits = np.isin(ids, np.asarray(self.ids, dtype=np.int64))
            return window.start + np.flatnonzero(hits)
        w = np.asarray(self.event.word.ids, dtype=np.int64)
        m = len(w)
        n = len(ids)
        if n < m:
            return np.empty(0, dtype=np.int64)
        hits = np.ones(n - m + 1, dtype=bool)
        for j in range(m):
            hits &= ids[j : n - m + 1 + j] == w[j]
        return window.start + np.flatnonzero(hits)

    def render(self) -> str:
        if self.kind == "states":
            return "states{" + ",".join(self.alphabet.label_of(i) for i in self.ids) + "}"
        return self.event.render()

    def __eq__(self, other):
        if not isinstance(other, EventSet):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.alphabet == other.alphabet
            and self.ids == other.ids
            and self.event == other.event
        )


@dataclass(frozen=True)
class RecurrenceTrace:
    """Successive visit positions of a path to an event.

    ``positions`` holds absolute coordinates in increasing order and contains
    0 exactly when the path sits in the event at the origin; the stationary
    gap sequence is the tuple of consecutive differences.
    """

    anchor_in_C: bool
    positions: tuple[int, ...]
    requested_forward: int
    requested_backward: int = 0

    def __post_init__(self):
        pos = self.positions
        if any(a >= b for a, b in zip(pos, pos[1:])):
            raise ValueError("visit positions must be strictly increasing")
        if (0 in pos) != self.anchor_in_C:
            raise ValueError("position 0 must be present exactly when anchored")

    @property
    def found_forward(self) -> int:
        return sum(1 for p in self.positions if p > 0)

    @property
    def found_backward(self) -> int:
        return sum(1 for p in self.positions if p < 0)

    @property
    def complete(self) -> bool:
        return (
            self.found_forward >= self.requested_forward
            and self.found_backward >= self.requested_backward
        )

    def gaps(self) -> tuple[int, ...]:
        return tuple(
            int(b - a) for a, b in zip(self.positions, self.positions[1:])
        )


def recurrence_times(path, C: EventSet, max_k: int, min_k: int = 0) -> RecurrenceTrace:
    """Visit positions of the path to C: the k-th visit after 0 for k <= max_k.

    With min_k < 0, also the |min_k| visits nearest before 0.  When the
    window holds fewer visits than requested the partial trace is returned;
    ``complete`` distinguishes it.
    """
    if isinstance(path, PathSample):
        path = path.window
    if max_k < 0 or min_k > 0:
        raise ValueError("expected max_k >= 0 >= min_k")
    if max_k == 0 and min_k == 0:
        raise ValueError("at least one visit must be requested")
    m = C.pattern_len
    if path.start > 0 or path.end < m - 1:
        raise RangeNotCoveredError(
            "window must cover the origin pattern coordinates 0..%d" % (m - 1)
        )
    visits = C.visit_positions(path)
    anchored = bool(np.isin(0, visits))
    fwd = visits[visits >= 1][:max_k]
    n_back = -min_k
    bwd = visits[visits <= -1]
    if n_back:
        bwd = bwd[-n_back:]
    else:
        bwd = bwd[:0]
    positions = tuple(int(p) for p in bwd)
    if anchored:
        positions += (0,)
    positions += tuple(int(p) for p in fwd)
    return RecurrenceTrace(anchored, positions, max_k, n_back)


# -- exact chain-level laws ---------------------------------------------------


@dataclass(frozen=True)
class _ChainEvent:
    """A finite chain restricted to its positive-mass states, with C marked."""

    K: np.ndarray
    pi: np.ndarray
    mask: np.ndarray
    prob: float


def _require_irreducible(K: np.ndarray):
    size = K.shape[0]
    for mat in (K, K.T):
        seen = np.zeros(size, dtype=bool)
        seen[0] = True
        stack = [0]
        while stack:
            s = stack.pop()
            for t in np.flatnonzero(mat[s] > 0):
                if not seen[t]:
                    seen[t] = True
                    stack.append(int(t))
        if not seen.all():
            raise NotIrreducibleError("transition matrix is not irreducible")


def _block_chain(K: np.ndarray, pi: np.ndarray, word) -> _ChainEvent:
    word = tuple(int(y) for y in word)
    m = len(word)
    tuples = [(s,) for s in np.flatnonzero(pi > 0)]
    for _ in range(m - 1):
        nxt = []
        for t in tuples:
            for b in np.flatnonzero(K[t[-1]] > 0):
                nxt.append(t + (int(b),))
        tuples = nxt
        if len(tuples) > _BLOCK_STATE_BUDGET:
            raise EnumerationBudgetError(
                "block-chain construction exceeds %d states" % _BLOCK_STATE_BUDGET
            )
    index = {t: k for k, t in enumerate(tuples)}
    size = len(tuples)
    Kb = np.zeros((size, size))
    pib = np.empty(size)
    mask = np.zeros(size, dtype=bool)
    for k, t in enumerate(tuples):
        p = pi[t[0]]
        for a, b in zip(t, t[1:]):
            p *= K[a, b]
        pib[k] = p
        mask[k] = t == word
        for b in np.flatnonzero(K[t[-1]] > 0):
            j = index.get(t[1:] + (int(b),))
            if j is not None:
                Kb[k, j] = K[t[-1], b]
    return _ChainEvent(Kb, pib, mask, float(pib[mask].sum()))


def _chain_event(model, C: EventSet) -> _ChainEvent:
    if model.variant not in ("iid", "markov"):
        raise UnsupportedKindError(
            "exact recurrence laws support iid and markov models only"
        )
    if model.alphabet != C.alphabet:
        raise ValueError("event alphabet does not match the model")
    pi, K = model.chain_view()
    if C.kind == "cylinder" and len(C.event.word) > 1:
        ce = _block_chain(K, pi, C.event.word.ids)
    else:
        keep = np.flatnonzero(pi > 0)
        pi = pi[keep]
        K = K[np.ix_(keep, keep)]
        ids = C.ids if C.kind == "states" else (C.event.word.ids[0],)
        mask = np.isin(keep, np.asarray(ids, dtype=np.int64))
        ce = _ChainEvent(K, pi, mask, float(pi[mask].sum()))
    if ce.prob <= 0.0:
        raise ValueError("event has zero stationary probability")
    _require_irreducible(ce.K)
    return ce


def event_prob(model, C: EventSet) -> float:
    """Exact stationary probability of the event."""
    return _chain_event(model, C).prob


def return_map_invariance(model, C: EventSet) -> float:
    """Exact residual of the law-preservation of the first-return map.

    Starting from the conditioned stationary law on C and applying one full
    return (any number of steps outside C, then a step landing in C) must
    reproduce the same law; the infinite sum over excursion lengths is the
    linear solve (I - K_D)^{-1} with K_D the kernel with C-columns zeroed.
    Returns the max-norm difference, which is a pure float-arithmetic
    residual.  A nonzero value of any size would mean the gap sequence is
    not shift-stationary.
    """
    ce = _chain_event(model, C)
    inside = np.flatnonzero(ce.mask)
    start = ce.pi * ce.mask / ce.prob
    KD = ce.K * (~ce.mask)[np.newaxis, :]
    # landing(s') = sum_k (start @ KD^k @ K)(s') over s' in C, via a solve
    # on the transposed system.
    resolvent = np.linalg.solve(np.eye(ce.K.shape[0]) - KD.T, start)
    landing = (resolvent @ ce.K) * ce.mask
    return float(np.max(np.abs(landing[inside] - start[inside])))


def kac_expected_return(model, C: EventSet) -> float:
    """Exact mean return time to C from a stationary visit; equals 1/P(C)."""
    ce = _chain_event(model, C)
    outside = ~ce.mask
    extra = np.zeros(int(ce.mask.sum()))
    if outside.any():
        A = ce.K[np.ix_(outside, outside)]
        h = np.linalg.solve(np.eye(A.shape[0]) - A, np.ones(A.shape[0]))
        extra = ce.K[np.ix_(ce.mask, outside)] @ h
    start = ce.pi[ce.mask] / ce.prob
    return float(start @ (1.0 + extra))


def _conditioned_start(ce: _ChainEvent) -> np.ndarray:
    return ce.pi * ce.mask / ce.prob


def recurrence_joint_law(model, C: EventSet, gaps) -> float:
    """Exact P(first return gaps equal the given tuple | start in C)."""
    gaps = tuple(int(r) for r in gaps)
    if not gaps or any(r < 1 for r in gaps):
        raise ValueError("gaps must be a non-empty tuple of integers >= 1")
    ce = _chain_event(model, C)
    avoid = ~ce.mask
    alpha = _conditioned_start(ce)
    for r in gaps:
        for _ in range(r - 1):
            alpha = (alpha @ ce.K) * avoid
        alpha = (alpha @ ce.K) * ce.mask
    return float(alpha.sum())


@dataclass(frozen=True)
class GapLaw:
    """Truncated exact law of the return gap, with its certified tail.

    ``probs[r]`` is the exact probability of a gap of length r; ``tail`` is
    the exact remaining mass P(gap > r_max), and ``contraction`` the last
    observed per-step decay ratio of that mass.
    """

    probs: dict[int, float]
    r_max: int
    tail: float
    contraction: float

    def mean(self, cap: int | None = None) -> float:
        f = (lambda r: min(r, cap)) if cap is not None else (lambda r: r)
        return math.fsum(f(r) * p for r, p in self.probs.items())

    def total(self) -> float:
        return math.fsum(self.probs.values())


def gap_law_table(
    model, C: EventSet, tail_tol: float = 1e-12, r_max: int | None = None
) -> GapLaw:
    """Exact gap probabilities out to a tail below tail_tol (or a fixed r_max)."""
    ce = _chain_event(model, C)
    avoid = ~ce.mask
    beta = _conditioned_start(ce)
    probs: dict[int, float] = {}
    r = 0
    prev = 1.0
    ratio = 0.0
    while True:
        r += 1
        nxt = beta @ ce.K
        probs[r] = float((nxt * ce.mask).sum())
        beta = nxt * avoid
        tail = float(beta.sum())
        ratio = tail / prev if prev > 0 else 0.0
        prev = tail
        if r_max is not None:
            if r >= r_max:
                break
        elif tail <= tail_tol:
            break
        elif r >= _LAW_STEP_BUDGET:
            raise EnumerationBudgetError(
                "gap law tail did not pass below %g within %d steps"
                % (tail_tol, _LAW_STEP_BUDGET)
            )
    return GapLaw(probs, r, tail, ratio)


def exact_block_law(
    model,
    C: EventSet,
    block_len: int,
    tail_tol: float = 1e-12,
    prune_tol: float = 1e-12,
):
    """Exact joint law of block_len consecutive gaps, enumerated with pruning.

    Returns (law, dropped) where law maps gap tuples to exact probabilities
    and dropped is the mass lost to truncation and pruning.
    """
    if block_len < 1:
        raise ValueError("block_len must be >= 1")
    marginal = gap_law_table(model, C, tail_tol)
    ce = _chain_event(model, C)
    avoid = ~ce.mask
    out: dict[tuple[int, ...], float] = {}

    def extend(alpha: np.ndarray, prefix: tuple[int, ...]):
        if len(prefix) == block_len:
            out[prefix] = float(alpha.sum())
            return
        beta = alpha
        for r in range(1, marginal.r_max + 1):
            nxt = beta @ ce.K
            hit = nxt * ce.mask
            if float(hit.sum()) > prune_tol:
                extend(hit, prefix + (r,))
            beta = nxt * avoid
            if float(beta.sum()) <= prune_tol:
                break

    extend(_conditioned_start(ce), ())
    dropped = 1.0 - math.fsum(out.values())
    return out, max(0.0, dropped)


# -- the unary bridge ---------------------------------------------------------


class IndicatorModel:
    """Binary stationary law of (1 if the chain sits in C else 0)."""

    variant = "indicator"
    is_stationary = True

    def __init__(self, base, C: EventSet):
        ce = _chain_event(base, C)
        self.base = base
        self.event = C
        self.alphabet = Alphabet("target", ("0", "1"))
        self.chain = HiddenChain(
            ce.K, ce.pi, ce.mask.astype(np.int64), self.alphabet
        )
        self._ce = ce

    def hidden_rep(self) -> HiddenChain:
        return self.chain

    def window_prob(self, ids) -> float:
        ids = np.asarray(ids, dtype=np.int64)
        ch = self.chain
        alpha = ch.sigma * (ch.obs == ids[0])
        for t in ids[1:]:
            alpha = (alpha @ ch.M) * (ch.obs == t)
        return float(alpha.sum())

    def descriptor(self) -> dict:
        return {
            "variant": "indicator",
            "base": self.base.descriptor(),
            "event": self.event.render(),
        }


@dataclass(frozen=True)
class BridgeReport:
    """Gap law recovered through the unary code versus the direct return law.

    The bridge side encodes each gap tuple through the unary code (gap r is
    the codeword of source symbol r-1, so codeword length equals the gap),
    prepends the separator that marks the parse boundary at 0, and evaluates
    the indicator law's window probability against the boundary probability.
    Parse validity holds almost surely here (returns to C are almost surely
    infinite in both directions for an irreducible chain), so the boundary
    event reduces to the indicator being 1 at the origin.
    """

    r_max: int
    j_max: int
    tolerance: float
    boundary_prob: float
    event_prob: float
    normalization_residual: float
    gap_law: dict[int, float]
    tuples_checked: int
    per_j_residual: dict[int, float]
    max_residual: float
    worst_tuple: tuple[int, ...]
    passed: bool
    evaluate: object = field(repr=False, compare=False, default=None)

    def implied_prob(self, gaps) -> float:
        """The bridge law of a gap tuple (window-probability quotient)."""
        return self.evaluate(tuple(int(r) for r in gaps))


def unary_bridge(
    model,
    C: EventSet,
    r_max: int = 10,
    j_max: int = 3,
    tolerance: float = 1e-9,
) -> BridgeReport:
    """Recover the return-gap law through the unary code and compare it.

    The indicator process of C is coded with codewords of r-1 zeros and a
    one, so a source window of gaps maps to the indicator window between
    successive visits; the implied source law is the quotient of the coded
    window probability by the boundary probability.  Every gap tuple with
    entries at most r_max and length at most j_max is checked against the
    taboo-kernel return law.
    """
    if r_max < 1 or j_max < 1:
        raise ValueError("r_max and j_max must be >= 1")
    ymodel = IndicatorModel(model, C)
    code = make_unary(range(r_max))
    boundary = ymodel.window_prob([1])
    event_prob = ymodel._ce.prob
    kac = kac_expected_return(model, C)
    norm_resid = abs(kac * boundary - 1.0)

    def bridge_value(gaps: tuple[int, ...]) -> float:
        bad = [r for r in gaps if not 1 <= r <= r_max]
        if bad:
            raise ValueError("gap %d outside the coded support 1..%d" % (bad[0], r_max))
        xw = Window(code.source, 1, tuple(r - 1 for r in gaps))
        coded = encode(code, xw)
        return ymodel.window_prob((1,) + tuple(coded.window.ids)) / boundary

    gap_law: dict[int, float] = {}
    per_j: dict[int, float] = {}
    worst = -1.0
    worst_tuple: tuple[int, ...] = ()
    checked = 0
    for j in range(1, j_max + 1):
        jworst = 0.0
        for tup in product(range(1, r_max + 1), repeat=j):
            val = bridge_value(tup)
            exact = recurrence_joint_law(model, C, tup)
            resid = abs(val - exact)
            checked += 1
            jworst = max(jworst, resid)
            if resid > worst:
                worst = resid
                worst_tuple = tup
            if j == 1:
                gap_law[tup[0]] = val
        per_j[j] = jworst
    report = BridgeReport(
        r_max=r_max,
        j_max=j_max,
        tolerance=tolerance,
        boundary_prob=boundary,
        event_prob=event_prob,
        normalization_residual=norm_resid,
        gap_law=gap_law,
        tuples_checked=checked,
        per_j_residual=per_j,
        max_residual=worst,
        worst_tuple=worst_tuple,
        passed=worst <= tolerance and abs(boundary - event_prob) <= tolerance,
        evaluate=bridge_value,
    )
    return report


# -- recurrence parsing -------------------------------------------------------


@dataclass(frozen=True)
class RecurrenceParse:
    """Words of a stream cut at successive visits to a fixed pattern.

    ``boundaries`` are the visit positions; word k runs from one position
    after boundary k-1 through boundary k inclusive, so concatenating the
    words reproduces the stream between the first and last visit.
    """

    alphabet: Alphabet
    boundaries: tuple[int, ...]
    words: tuple[Word, ...]

    def gaps(self) -> tuple[int, ...]:
        return tuple(len(w) for w in self.words)

    def concat(self) -> Window:
        ids = tuple(i for w in self.words for i in w.ids)
        return Window(self.alphabet, self.boundaries[0] + 1, ids)


def recurrence_parse(yw, B: CylinderEvent) -> RecurrenceParse:
    """Cut a window into words ending at each visit to the offset-0 event B."""
    if isinstance(yw, PathSample):
        yw = yw.window
    if B.start != 0:
        raise ValueError("parsing events must be anchored at offset 0")
    ev = EventSet.from_event(B)
    visits = ev.visit_positions(yw)
    if len(visits) < 2:
        raise InsufficientVisitsError(
            "parsing needs at least 2 visits, found %d" % len(visits)
        )
    boundaries = tuple(int(p) for p in visits)
    words = []
    for a, b in zip(boundaries, boundaries[1:]):
        words.append(Word(yw.alphabet, tuple(int(i) for i in yw.segment(a + 1, b))))
    return RecurrenceParse(yw.alphabet, boundaries, tuple(words))


# -- stationarity and ergodicity diagnostics ---------------------------------


def _tv(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    core = math.fsum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
    rest_p = max(0.0, 1.0 - math.fsum(p.values()))
    rest_q = max(0.0, 1.0 - math.fsum(q.values()))
    return 0.5 * (core + rest_p + rest_q)


@dataclass(frozen=True)
class GapStationarityReport:
    """Empirical gap-block laws at offsets 0 and 1 and their distances."""

    block_len: int
    n_gaps: int
    tv_offset: float
    tv_exact: float | None
    blocks_offset0: dict[tuple[int, ...], float]
    blocks_offset1: dict[tuple[int, ...], float]


def gap_stationarity_report(
    trace: RecurrenceTrace, block_len: int, exact_law: dict | None = None
) -> GapStationarityReport:
    """Compare gap-block statistics at offsets 0 and 1 (and to an exact law).

    Blocks are consecutive non-overlapping tuples of block_len gaps; under
    stationarity of the gap sequence both offsets estimate the same law.
    ``exact_law`` maps gap tuples to exact probabilities (possibly truncated;
    missing mass is counted against the distance, an upper bound).
    """
    if block_len < 1:
        raise ValueError("block_len must be >= 1")
    gaps = trace.gaps()
    n = len(gaps)
    if n < 10 * block_len:
        raise InsufficientVisitsError(
            "need at least %d gaps for block length %d, have %d"
            % (10 * block_len, block_len, n)
        )

    def empirical(offset: int) -> dict[tuple[int, ...], float]:
        counts: dict[tuple[int, ...], int] = {}
        total = 0
        i = offset
        while i + block_len <= n:
            key = tuple(gaps[i : i + block_len])
            counts[key] = counts.get(key, 0) + 1
            total += 1
            i += block_len
        return {k: c / total for k, c in counts.items()}

    emp0 = empirical(0)
    emp1 = empirical(1)
    tv_exact = _tv(emp0, exact_law) if exact_law is not None else None
    return GapStationarityReport(
        block_len=block_len,
        n_gaps=n,
        tv_offset=_tv(emp0, emp1),
        tv_exact=tv_exact,
        blocks_offset0=emp0,
        blocks_offset1=emp1,
    )


@dataclass(frozen=True)
class ExactGapStats:
    """Exact moments of a capped gap functional under the stationary gap law.

    ``long_run_variance`` sums the lag autocovariances of the gap sequence,
    so long_run_variance/n is the asymptotic variance of an n-gap average.
    """

    cap: int
    mean: float
    variance: float
    long_run_variance: float
    lags_used: int
    law: GapLaw


def gap_functional_stats(
    model,
    C: EventSet,
    cap: int,
    tail_tol: float = 1e-12,
    lag_cap: int = 2000,
) -> ExactGapStats:
    """Exact mean and long-run variance of min(gap, cap) under the gap law."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    law = gap_law_table(model, C, tail_tol)
    ce = _chain_event(model, C)
    avoid = ~ce.mask
    f = {r: float(min(r, cap)) for r in law.probs}
    # the tail beyond r_max is capped as well, so its contribution is exact
    mean = math.fsum(f[r] * p for r, p in law.probs.items()) + cap * law.tail
    var = (
        math.fsum((f[r] - mean) ** 2 * p for r, p in law.probs.items())
        + (cap - mean) ** 2 * law.tail
    )
    # cross moments below run on the truncated kernels, so they are centered
    # with the truncated mean; the mismatch is of the order of the tail
    mean_trunc = math.fsum(f[r] * p for r, p in law.probs.items())

    def weighted_landing(start: np.ndarray, weigh: bool) -> np.ndarray:
        """sum_r [f(r) if weigh] * (start taken r steps to its next C-visit)."""
        out = np.zeros_like(start)
        beta = start
        for r in range(1, law.r_max + 1):
            nxt = beta @ ce.K
            hit = nxt * ce.mask
            out += f[r] * hit if weigh else hit
            beta = nxt * avoid
            if float(beta.sum()) <= tail_tol * 1e-3:
                break
        return out

    alpha0 = _conditioned_start(ce)
    v = weighted_landing(alpha0, True)
    covs = []
    # exit once the lag covariances sink into the float-noise floor of the
    # cross moments, which scales with the squared mean
    tiny = max(var, mean_trunc * mean_trunc, 1.0) * 1e-13
    small_run = 0
    for _ in range(lag_cap):
        cross = float(weighted_landing(v, True).sum())
        covs.append(cross - mean_trunc * mean_trunc)
        before = float(v.sum())
        v = weighted_landing(v, False)
        after = float(v.sum())
        if after > 0.0:
            # the exact return kernel preserves mass; undo the truncation leak
            v *= before / after
        if abs(covs[-1]) < tiny:
            small_run += 1
            if small_run >= 2:
                break
        else:
            small_run = 0
    long_run = var + 2.0 * math.fsum(covs)
    return ExactGapStats(
        cap=cap,
        mean=mean,
        variance=var,
        long_run_variance=long_run,
        lags_used=len(covs),
        law=law,
    )


def sample_recurrence_trace(model, C: EventSet, n_gaps: int, seed: int):
    """Sample a path and extract n_gaps+1 visits; returns (trace, path).

    The path length is retried geometrically from a mean-return estimate, so
    the result depends only on (model, seed, n_gaps).
    """
    if n_gaps < 1:
        raise ValueError("n_gaps must be >= 1")
    need = n_gaps + 2
    kac = kac_expected_return(model, C)
    length = int(need * kac * 1.25) + 64 + C.pattern_len
    for _ in range(12):
        path = sample(model, 0, length, seed)
        trace = recurrence_times(path, C, max_k=need)
        if trace.found_forward >= need:
            return trace, path
        length *= 2
    raise InsufficientVisitsError(
        "could not find %d visits within %d symbols" % (need, length)
    )


@dataclass(frozen=True)
class BirkhoffGapAgreement:
    """Multi-seed averages of a capped gap functional against the exact mean."""

    cap: int
    n_gaps: int
    seeds: tuple[int, ...]
    means: tuple[float, ...]
    exact_mean: float
    sigma_mean: float
    sigma_factor: float
    max_deviation: float
    max_pairwise: float
    passed: bool


def birkhoff_gap_agreement(
    model,
    C: EventSet,
    seeds,
    n_gaps: int,
    cap: int = 10,
    sigma_factor: float = 4.0,
) -> BirkhoffGapAgreement:
    """Check seed-to-seed and seed-to-exact agreement of gap averages.

    The comparison scale is the exact asymptotic standard deviation of an
    n-gap average (autocovariances included), multiplied by sigma_factor;
    pairwise differences get the extra sqrt(2).
    """
    seeds = tuple(int(s) for s in seeds)
    if len(seeds) < 2:
        raise ValueError("need at least two seeds")
    stats = gap_functional_stats(model, C, cap)
    sd = math.sqrt(max(stats.long_run_variance, 0.0) / n_gaps)
    means = []
    for s in seeds:
        trace, _ = sample_recurrence_trace(model, C, n_gaps, s)
        gs = trace.gaps()[:n_gaps]
        if len(gs) < n_gaps:
            raise InsufficientVisitsError("trace came up short of %d gaps" % n_gaps)
        means.append(math.fsum(min(g, cap) for g in gs) / n_gaps)
    max_dev = max(abs(m - stats.mean) for m in means)
    max_pair = max(
        abs(a - b) for i, a in enumerate(means) for b in means[i + 1 :]
    )
    passed = max_dev <= sigma_factor * sd and max_pair <= sigma_factor * math.sqrt(2) * sd
    return BirkhoffGapAgreement(
        cap=cap,
        n_gaps=n_gaps,
        seeds=seeds,
        means=tuple(means),
        exact_mean=stats.mean,
        sigma_mean=sd,
        sigma_factor=sigma_factor,
        max_deviation=max_dev,
        max_pairwise=max_pair,
        passed=passed,
    )


# -- trace export -------------------------------------------------------------


def write_trace(trace: RecurrenceTrace, path, *, model, event: EventSet, seed: int):
    """Write visit positions as plain text, one integer per line."""
    lines = [
        "# recurrence trace v1",
        "# model: %s" % model_digest(model),
        "# event: %s" % event.render(),
        "# seed: %d" % seed,
        "# anchored: %s" % ("true" if trace.anchor_in_C else "false"),
    ]
    lines.extend(str(p) for p in trace.positions)
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def read_trace(path):
    """Read a trace written by write_trace; returns (trace, header dict)."""
    if hasattr(path, "read"):
        text = path.read()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    header: dict[str, str] = {}
    positions = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                key, val = body.split(":", 1)
                header[key.strip()] = val.strip()
            continue
        positions.append(int(line))
    anchored = header.get("anchored", "false") == "true"
    forward = sum(1 for p in positions if p > 0)
    backward = sum(1 for p in positions if p < 0)
    trace = RecurrenceTrace(anchored, tuple(positions), forward, backward)
    return trace, header
