"""Normalized transport of stationary laws through comma-class codes.

Forward direction: the transported probability of a target cylinder is the
expected spread divided by the expected quasi-period.  Both are computed
exactly on a codeword-position tower chain: hidden states are (source
symbol, position inside its codeword), which makes the transported law an
ordinary stationary hidden chain with deterministic per-state observations.

Inverse direction: the source probability of a cylinder is the ratio of two
target-side probabilities, each an intersection of parse-validity events at
every depth.  Finite depth gives certified upper bounds; the infinite-depth
limits are still exactly computable because parse survival is an absorption
probability of a finite substochastic chain (solved by one linear system).
Results are returned as brackets [lo, hi]; the bracket collapses whenever
the finite-depth bound already sits on the limit.

Mixture inputs are routed per ergodic component; the pooled ratio (wrong for
mixtures) is exposed only by decomposition_check as a diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .codes import FinitaryCode
from .core import CylinderEvent, shift_event
from .errors import (
    NonCanonicalCylinderError,
    StochasticityError,
    ZeroBoundaryError,
)
from .measures import (
    DEFAULT_BUDGET,
    HiddenChain,
    PushforwardModel,
    cylinder_prob,
)

__all__ = [
    "Bracket",
    "TransportResult",
    "ComponentTransport",
    "TransportedModel",
    "TransportedMixture",
    "transported_model",
    "expected_quasi_period",
    "forward",
    "InverseEvaluator",
    "boundary_prob",
    "inverse",
    "normalization_residual",
    "cesaro_mean",
    "cesaro_profile",
    "DecompositionReport",
    "decomposition_check",
]

DEFAULT_DEPTH = 12

_EXACT_TOL = 1e-12


@dataclass(frozen=True)
class Bracket:
    """Certified interval for a quantity defined as a monotone limit."""

    lo: float
    hi: float
    depth: int
    exact: bool

    def __post_init__(self):
        if self.lo > self.hi + 1e-12:
            raise ValueError(f"bracket lo {self.lo} exceeds hi {self.hi}")

    @property
    def width(self) -> float:
        return max(0.0, self.hi - self.lo)

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= value <= self.hi + slack


def _make_bracket(lo: float, hi: float, depth: int) -> Bracket:
    lo = min(lo, hi)  # guard float noise in the two computation paths
    return Bracket(lo, hi, depth, exact=hi - lo <= _EXACT_TOL)


@dataclass(frozen=True)
class ComponentTransport:
    weight: float
    value: float
    numerator: float
    denominator: float


@dataclass(frozen=True)
class TransportResult:
    """Forward transport value with its defining ratio.

    For ergodic inputs value = numerator/denominator (expected spread over
    expected quasi-period).  For mixtures, value is the weighted sum of
    component ratios, while numerator/denominator carry the pooled sums
    (whose ratio is generally the wrong answer; see decomposition_check).
    """

    value: float
    numerator: float
    denominator: float
    event: CylinderEvent
    components: tuple[ComponentTransport, ...] = field(default=())


# -- transported stationary models -----------------------------------------


class TransportedModel:
    """Stationary law of the normalized forward transport of an ergodic source.

    Realized as the codeword-position tower chain: states (x, i) with i a
    position inside f(x), weight mu(x)/E[L], observing f(x)[i].
    """

    variant = "transported"
    is_stationary = True

    def __init__(self, code: FinitaryCode, base):
        code._require_exact("normalized transport")
        if not base.is_stationary or base.variant not in ("iid", "markov"):
            raise StochasticityError("transported base must be ergodic (iid/markov)")
        if base.alphabet != code.source:
            raise StochasticityError("transported base alphabet must match source")
        self.code = code
        self.base = base
        self.alphabet = code.target
        mu, K = base.chain_view()
        states = [
            (x, i) for x in range(code.source.size) for i in range(code.length(x))
        ]
        index = {s: k for k, s in enumerate(states)}
        size = len(states)
        M = np.zeros((size, size))
        obs = np.empty(size, dtype=np.int64)
        expected_len = float(
            math.fsum(mu[x] * code.length(x) for x in range(code.source.size))
        )
        sigma = np.empty(size)
        for k, (x, i) in enumerate(states):
            obs[k] = code.codewords[x][i]
            sigma[k] = mu[x] / expected_len
            if i + 1 < code.length(x):
                M[k, index[(x, i + 1)]] = 1.0
            else:
                for x2 in range(code.source.size):
                    M[k, index[(x2, 0)]] = K[x, x2]
        self.states = tuple(states)
        self.expected_len = expected_len
        self.chain = HiddenChain(M, sigma, obs, code.target)

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
            "variant": "transported",
            "code": self.code.describe(),
            "base": self.base.descriptor(),
        }


class TransportedMixture:
    """Per-component transport of a mixture source, with the same weights."""

    variant = "transported_mixture"
    is_stationary = True

    def __init__(self, weights, parts):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.parts = tuple(parts)
        self.alphabet = parts[0].alphabet

    def window_prob(self, ids) -> float:
        return math.fsum(
            float(w) * p.window_prob(ids) for w, p in zip(self.weights, self.parts)
        )

    def descriptor(self) -> dict:
        return {
            "variant": "transported_mixture",
            "weights": [float(w) for w in self.weights],
            "parts": [p.descriptor() for p in self.parts],
        }


def transported_model(code: FinitaryCode, modelX):
    """The stationary transported law of a stationary source model."""
    if modelX.variant == "mixture":
        return TransportedMixture(
            modelX.weights,
            [TransportedModel(code, comp) for comp in modelX.components],
        )
    return TransportedModel(code, modelX)


def _ergodic_parts(model):
    """(weight, ergodic model) decomposition; trivial for ergodic inputs."""
    if model.variant == "mixture":
        return list(zip((float(w) for w in model.weights), model.components))
    if model.variant == "transported_mixture":
        return list(zip((float(w) for w in model.weights), model.parts))
    return [(1.0, model)]


# -- forward transport ------------------------------------------------------


def expected_quasi_period(code: FinitaryCode, modelX) -> float:
    """Mean codeword length of the symbol at source coordinate 1."""
    code._require_exact("expected_quasi_period")
    if modelX.alphabet != code.source:
        raise StochasticityError("model alphabet must match the code source")
    marginal = modelX.marginal()
    return float(
        math.fsum(
            float(marginal[x]) * code.length(x) for x in range(code.source.size)
        )
    )


def forward(code: FinitaryCode, modelX, B: CylinderEvent) -> TransportResult:
    """Transported probability of target cylinder B: E[spread]/E[quasi-period].

    Computed on the tower chain; the event start must be >= 1 (canonicalize
    non-positive starts by stationarity before calling).
    """
    code._require_exact("forward")
    if B.alphabet != code.target:
        raise ValueError("event alphabet is not the code's target")
    if B.start < 1:
        raise NonCanonicalCylinderError(
            "forward expects B.start >= 1; shift the event by stationarity first"
        )
    if modelX.variant in ("mixture", "transported_mixture"):
        comps = []
        for w, part in _ergodic_parts(modelX):
            sub = forward(code, part, B)
            comps.append(
                ComponentTransport(w, sub.value, sub.numerator, sub.denominator)
            )
        value = math.fsum(c.weight * c.value for c in comps)
        num = math.fsum(c.weight * c.numerator for c in comps)
        den = math.fsum(c.weight * c.denominator for c in comps)
        return TransportResult(value, num, den, B, tuple(comps))
    if isinstance(modelX, TransportedModel):
        if modelX.code is not code and modelX.code.describe() != code.describe():
            raise StochasticityError("transported model was built from a different code")
        tm = modelX
    else:
        tm = TransportedModel(code, modelX)
    ch = tm.chain
    word = np.asarray(B.word.ids, dtype=np.int64)
    # alpha starts as mu(x) on every tower state: E[L] times the stationary
    # weights.  Its total after the constrained propagation is the expected
    # spread E[G(B)].
    alpha = ch.sigma * tm.expected_len
    for _ in range(B.start - 1):
        alpha = alpha @ ch.M
    alpha = alpha * (ch.obs == word[0])
    for t in word[1:]:
        alpha = (alpha @ ch.M) * (ch.obs == t)
    num = float(alpha.sum())
    den = tm.expected_len
    return TransportResult(num / den, num, den, B)


# -- parse-survival machinery for the inverse direction ---------------------


def _survival_limit(C: np.ndarray) -> np.ndarray:
    """Exact limit of C^d 1: probability the parse never dies.

    The maximal mass-preserving subset is found by pruning leaky states;
    survival equals the absorption probability into that subset, one linear
    solve on the complement.
    """
    size = C.shape[0]
    safe = np.ones(size, dtype=bool)
    changed = True
    while changed:
        changed = False
        rows = C[:, safe].sum(axis=1)
        for s in np.flatnonzero(safe):
            if rows[s] < 1.0 - 1e-12:
                safe[s] = False
                changed = True
    q = np.zeros(size)
    q[safe] = 1.0
    unsafe = ~safe
    if unsafe.any():
        A = C[np.ix_(unsafe, unsafe)]
        b = C[np.ix_(unsafe, safe)].sum(axis=1)
        q[unsafe] = np.linalg.solve(np.eye(A.shape[0]) - A, b)
    return np.clip(q, 0.0, 1.0)


class _ParseEngine:
    """Per-(code, ergodic target model) parse probabilities around coordinate 0.

    Forward parsing from a known boundary is deterministic (comma-class
    codewords are prefix-free), so the one-codeword forward operator is a
    disjoint sum of observation-constrained chain walks.  Backward parsing
    is separator-driven: reversed codewords are not suffix-free, so the
    leftward scan reads a codeword's suffix, its separator, then word
    symbols up to the previous separator, keeping the pending suffix as
    extra automaton state.  Segments between separators make the backward
    decomposition disjoint as well.
    """

    def __init__(self, code: FinitaryCode, model):
        code._require_exact("parse probabilities")
        if model.alphabet != code.target:
            raise StochasticityError("model alphabet must match the code target")
        self.code = code
        ch = model.hidden_rep()
        self.ch = ch
        size = len(ch.sigma)
        rev = ch.reversed_kernel()

        def dmat(y: int) -> np.ndarray:
            return np.diag((ch.obs == int(y)).astype(float))

        # forward: one complete codeword, consume-then-advance per symbol
        C = np.zeros((size, size))
        for cw in code.codewords:
            op = np.eye(size)
            for y in cw:
                op = op @ dmat(y) @ ch.M
            C += op
        self.C_fwd = C
        self.q_fwd = _survival_limit(C)
        self._dmat = dmat

        # backward: advance-then-consume per symbol, leftward
        def bstep(y: int) -> np.ndarray:
            return rev @ dmat(y)

        def bchain(symbols) -> np.ndarray:
            op = np.eye(size)
            for y in reversed(tuple(symbols)):
                op = op @ bstep(y)
            return op

        sep = code.separator
        suffixes = []
        for x in range(code.source.size):
            z = code.suffix_part(x)
            if z not in suffixes:
                suffixes.append(z)
        self._suffixes = suffixes
        nz = len(suffixes)
        # entry operator: from the state at coordinate 1, read the first
        # codeword's suffix (rightmost symbol first) and its separator
        self.I0 = np.zeros((size, nz * size))
        for zi, z in enumerate(suffixes):
            self.I0[:, zi * size : (zi + 1) * size] = bchain(z) @ bstep(sep)
        # one backward codeword: word part of a codeword with the pending
        # suffix, then the previous codeword's suffix and separator
        T = np.zeros((nz * size, nz * size))
        for zi, z in enumerate(suffixes):
            word_ops = np.zeros((size, size))
            for x in range(code.source.size):
                if code.suffix_part(x) == z:
                    word_ops += bchain(code.word_part(x))
            for zj, z2 in enumerate(suffixes):
                T[zi * size : (zi + 1) * size, zj * size : (zj + 1) * size] = (
                    word_ops @ bchain(z2) @ bstep(sep)
                )
        self.T_bwd = T
        self.q_bwd = _survival_limit(T)

    def _depth_vectors(self, depth: int):
        f = np.ones(len(self.ch.sigma))
        for _ in range(depth):
            f = self.C_fwd @ f
        b = np.ones(self.T_bwd.shape[0])
        for _ in range(depth):
            b = self.T_bwd @ b
        return f, self.I0 @ b

    def _exact_vectors(self):
        return self.q_fwd, self.I0 @ self.q_bwd

    def _assemble(self, fwd_vec: np.ndarray, bwd_vec: np.ndarray) -> float:
        # both vectors are conditioned on the hidden state at coordinate 1;
        # the backward entry operator already took the step to coordinate 0.
        return float(np.sum(self.ch.sigma * bwd_vec * fwd_vec))

    def boundary(self, depth: int) -> tuple[float, float]:
        """(exact limit, depth-d upper bound) of the full-parse probability."""
        f_d, b_d = self._depth_vectors(depth)
        hi = self._assemble(f_d, b_d)
        f_inf, b_inf = self._exact_vectors()
        lo = self._assemble(f_inf, b_inf)
        return lo, hi

    def pattern(self, source_ids, depth: int) -> tuple[float, float]:
        """Same, with the first codewords forced to spell f(a_1)..f(a_k)."""
        size = len(self.ch.sigma)
        op = np.eye(size)
        for a in source_ids:
            for y in self.code.codewords[int(a)]:
                op = op @ self._dmat(y) @ self.ch.M
        f_d, b_d = self._depth_vectors(depth)
        hi = self._assemble(op @ f_d, b_d)
        f_inf, b_inf = self._exact_vectors()
        lo = self._assemble(op @ f_inf, b_inf)
        return lo, hi


class InverseEvaluator:
    """Reusable inverse transport for one code and one stationary target law.

    Building the parse operators is the expensive part; constructing the
    evaluator once and querying many source events amortizes it.
    """

    def __init__(self, code: FinitaryCode, modelY):
        if not modelY.is_stationary:
            raise StochasticityError("inverse transport requires a stationary target model")
        self.code = code
        self._parts = [(w, _ParseEngine(code, part)) for w, part in _ergodic_parts(modelY)]

    def boundary(self, depth: int = DEFAULT_DEPTH) -> Bracket:
        """Probability that the target stream parses with a boundary at 0.

        hi is the depth-d certified upper bound (d codewords verified on
        each side); lo is the exact infinite-depth limit from the survival
        solve.  The bracket is exact whenever the depth-d bound already
        equals the limit (boundary-complete situations).
        """
        if depth < 1:
            raise ValueError("depth must be >= 1")
        lo_t = hi_t = 0.0
        for w, eng in self._parts:
            lo, hi = eng.boundary(depth)
            lo_t += w * lo
            hi_t += w * hi
        return _make_bracket(lo_t, hi_t, depth)

    def value(self, A: CylinderEvent, depth: int = DEFAULT_DEPTH) -> Bracket:
        """Ratio bracket for the source event A (start must be 1)."""
        if depth < 1:
            raise ValueError("depth must be >= 1")
        if A.alphabet != self.code.source:
            raise ValueError("event alphabet is not the code's source")
        if A.start != 1:
            raise NonCanonicalCylinderError("inverse expects A.start == 1")
        lo_t = hi_t = 0.0
        for w, eng in self._parts:
            den_lo, den_hi = eng.boundary(depth)
            if den_hi <= 0.0:
                raise ZeroBoundaryError(
                    "target law gives the parse-boundary event probability 0"
                )
            num_lo, num_hi = eng.pattern(A.word.ids, depth)
            lo = num_lo / den_hi if den_hi > 0 else 0.0
            hi = min(1.0, num_hi / den_lo) if den_lo > 0 else 1.0
            lo_t += w * min(lo, hi)
            hi_t += w * hi
        return _make_bracket(lo_t, hi_t, depth)


def boundary_prob(code: FinitaryCode, modelY, depth: int = DEFAULT_DEPTH) -> Bracket:
    """Probability that the target stream parses with a boundary at 0."""
    return InverseEvaluator(code, modelY).boundary(depth)


def inverse(
    code: FinitaryCode, modelY, A: CylinderEvent, depth: int = DEFAULT_DEPTH
) -> Bracket:
    """Source-side probability recovered from a stationary target law.

    Value is the ratio P(parse spells f(a_1)..f(a_k) at coordinate 1, with
    a boundary at 0) over P(parse with a boundary at 0); each side is
    bracketed and the ratio bracket returned.  Mixture target laws are
    combined per ergodic component with their weights.
    """
    return InverseEvaluator(code, modelY).value(A, depth)


def normalization_residual(code: FinitaryCode, modelX) -> float:
    """|E[quasi-period] * P(parse boundary) - 1| on the transported law.

    Computed per ergodic component; the worst component residual is
    returned.
    """
    worst = 0.0
    for _, part in _ergodic_parts(modelX):
        el = expected_quasi_period(code, part)
        b = boundary_prob(code, TransportedModel(code, part))
        worst = max(worst, abs(el * b.lo - 1.0))
    return worst


# -- plain-transport stationary means ---------------------------------------


def cesaro_mean(
    modelY: PushforwardModel,
    c: CylinderEvent,
    n: int,
    budget: int = DEFAULT_BUDGET,
) -> float:
    """Average of the pushforward probabilities of the event shifted 0..n-1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    terms = [cylinder_prob(modelY, shift_event(c, i), budget) for i in range(n)]
    return math.fsum(terms) / n


def cesaro_profile(
    modelY: PushforwardModel,
    c: CylinderEvent,
    ns,
    budget: int = DEFAULT_BUDGET,
) -> dict[int, float]:
    """cesaro_mean at several n sharing one pass of partial sums."""
    ns = sorted(set(int(n) for n in ns))
    if not ns or ns[0] < 1:
        raise ValueError("ns must be positive integers")
    out = {}
    acc = []
    done = 0
    for n in ns:
        for i in range(done, n):
            acc.append(cylinder_prob(modelY, shift_event(c, i), budget))
        done = n
        out[n] = math.fsum(acc) / n
    return out


# -- ergodic decomposition diagnostic ---------------------------------------


@dataclass(frozen=True)
class DecompositionReport:
    """Mixture transport versus the (incorrect) pooled ratio."""

    event: CylinderEvent
    decomposition_value: float
    pooled_value: float
    difference: float
    components: tuple[ComponentTransport, ...]


def decomposition_check(
    code: FinitaryCode, mixtureX, B: CylinderEvent
) -> DecompositionReport:
    """Compare per-component transport with the pooled numerator/denominator.

    The decomposition value is the defined transport of a mixture; the
    pooled ratio treats the mixture as if it were ergodic and generally
    differs whenever component quasi-period means differ.
    """
    if mixtureX.variant != "mixture":
        raise StochasticityError("decomposition_check expects a mixture model")
    res = forward(code, mixtureX, B)
    pooled = res.numerator / res.denominator
    return DecompositionReport(
        event=B,
        decomposition_value=res.value,
        pooled_value=pooled,
        difference=res.value - pooled,
        components=res.components,
    )
