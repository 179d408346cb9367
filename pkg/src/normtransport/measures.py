"""Stationary process models, exact cylinder probabilities, seeded sampling.

Models are IID laws, irreducible stationary Markov chains (always started
from their stationary vector), finite mixtures of those (ergodic-component
bookkeeping), and the plain pushforward of a stationary model through a code
extension.  The pushforward is the one deliberately non-stationary member: it
anchors the coding boundary between coordinates 0 and 1.

Cylinder probabilities are exact (float64 enumeration with fsum):

* IID / Markov / Mixture: closed products.
* Pushforward: renewal decomposition over the last codeword boundary before
  the probed range plus a minimal-cover enumeration of source configurations,
  with a node budget guarding runaway enumeration.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .codes import FinitaryCode
from .core import Alphabet, CylinderEvent, Window
from .errors import (
    EnumerationBudgetError,
    NotIrreducibleError,
    StochasticityError,
    WindowTooShortError,
)

__all__ = [
    "IIDModel",
    "MarkovModel",
    "MixtureModel",
    "PushforwardModel",
    "HiddenChain",
    "PathSample",
    "stationary_distribution",
    "cylinder_prob",
    "sample",
    "birkhoff_frequency",
    "model_digest",
]

DEFAULT_BUDGET = 10_000_000

_ATOL = 1e-9


def _check_prob_vector(p: np.ndarray, what: str):
    if np.any(p < 0):
        raise StochasticityError(f"{what} has negative entries")
    if abs(float(p.sum()) - 1.0) > _ATOL:
        raise StochasticityError(f"{what} does not sum to 1 (got {p.sum()!r})")


def _frozen(a) -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64).copy()
    arr.setflags(write=False)
    return arr


def stationary_distribution(K: np.ndarray) -> np.ndarray:
    """Unique stationary row vector of an irreducible stochastic matrix.

    Solves the balance equations with the normalization row appended and
    verifies the residual max|pi K - pi| <= 1e-12.
    """
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise StochasticityError("transition matrix must be square")
    n = K.shape[0]
    for i in range(n):
        _check_prob_vector(K[i], f"row {i}")
    adj = K > 0
    if not _strongly_connected(adj):
        raise NotIrreducibleError("transition matrix is not irreducible")
    A = K.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    pi = np.linalg.solve(A, b)
    residual = float(np.max(np.abs(pi @ K - pi)))
    if residual > 1e-12:
        raise StochasticityError(f"stationarity residual {residual} > 1e-12")
    return pi


def _strongly_connected(adj: np.ndarray) -> bool:
    n = adj.shape[0]

    def reach(mat):
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        stack = [0]
        while stack:
            i = stack.pop()
            for j in np.flatnonzero(mat[i]):
                if not seen[j]:
                    seen[j] = True
                    stack.append(int(j))
        return seen

    return bool(reach(adj).all() and reach(adj.T).all())


@dataclass(frozen=True)
class HiddenChain:
    """A stationary finite chain with a symbol observation map.

    Used by the exact transport engines: IID and Markov models observe the
    chain state itself; induced representations (codeword-position towers,
    visit indicators) observe a function of it.
    """

    M: np.ndarray
    sigma: np.ndarray
    obs: np.ndarray  # target symbol id per hidden state
    alphabet: Alphabet

    def reversed_kernel(self) -> np.ndarray:
        """Time-reversed transitions; valid since sigma is stationary."""
        sig = self.sigma
        rev = (self.M * sig[:, None]).T  # entry [a, b] = sigma(b) M(b, a)
        return np.divide(
            rev, sig[:, None], out=np.zeros_like(rev), where=sig[:, None] > 0
        )


class IIDModel:
    """Independent draws from a fixed law at every coordinate."""

    variant = "iid"
    is_stationary = True

    def __init__(self, alphabet: Alphabet, p):
        self.alphabet = alphabet
        p = _frozen(p)
        if len(p) != alphabet.size:
            raise StochasticityError("one probability per symbol required")
        _check_prob_vector(p, "probability vector")
        self.p = p

    def chain_view(self):
        K = np.tile(self.p, (self.alphabet.size, 1))
        return self.p, K

    def marginal(self) -> np.ndarray:
        return self.p

    def window_prob(self, ids) -> float:
        return float(np.prod(self.p[np.asarray(ids, dtype=np.int64)]))

    def hidden_rep(self) -> HiddenChain:
        mu, K = self.chain_view()
        return HiddenChain(
            _frozen(K), mu, np.arange(self.alphabet.size, dtype=np.int64), self.alphabet
        )

    def descriptor(self) -> dict:
        return {
            "variant": "iid",
            "support": list(self.alphabet.labels),
            "probs": [float(x) for x in self.p],
        }


class MarkovModel:
    """Irreducible stationary Markov chain over the alphabet."""

    variant = "markov"
    is_stationary = True

    def __init__(self, alphabet: Alphabet, K):
        self.alphabet = alphabet
        K = _frozen(K)
        if K.shape != (alphabet.size, alphabet.size):
            raise StochasticityError("transition matrix shape mismatch")
        self.K = K
        self.pi = _frozen(stationary_distribution(K))

    def chain_view(self):
        return self.pi, self.K

    def marginal(self) -> np.ndarray:
        return self.pi

    def window_prob(self, ids) -> float:
        ids = np.asarray(ids, dtype=np.int64)
        p = float(self.pi[ids[0]])
        for a, b in zip(ids[:-1], ids[1:]):
            p *= float(self.K[a, b])
        return p

    def hidden_rep(self) -> HiddenChain:
        return HiddenChain(
            self.K, self.pi, np.arange(self.alphabet.size, dtype=np.int64), self.alphabet
        )

    def descriptor(self) -> dict:
        return {
            "variant": "markov",
            "support": list(self.alphabet.labels),
            "matrix": [[float(x) for x in row] for row in self.K],
        }


class MixtureModel:
    """Finite mixture of stationary ergodic components (ergodic decomposition)."""

    variant = "mixture"
    is_stationary = True

    def __init__(self, weights, components):
        w = _frozen(weights)
        if len(w) != len(components) or len(components) == 0:
            raise StochasticityError("one weight per component required")
        _check_prob_vector(w, "mixture weights")
        if np.any(w <= 0):
            raise StochasticityError("mixture weights must be positive")
        alphabets = {comp.alphabet for comp in components}
        if len(alphabets) != 1:
            raise StochasticityError("mixture components must share an alphabet")
        for comp in components:
            if comp.variant not in ("iid", "markov"):
                raise StochasticityError("mixture components must be iid or markov")
        self.weights = w
        self.components = tuple(components)
        self.alphabet = components[0].alphabet

    def marginal(self) -> np.ndarray:
        return sum(
            w * comp.marginal() for w, comp in zip(self.weights, self.components)
        )

    def window_prob(self, ids) -> float:
        return math.fsum(
            w * comp.window_prob(ids)
            for w, comp in zip(self.weights, self.components)
        )

    def descriptor(self) -> dict:
        return {
            "variant": "mixture",
            "weights": [float(x) for x in self.weights],
            "components": [comp.descriptor() for comp in self.components],
        }


class PushforwardModel:
    """Law of the coded image of a stationary source (boundary fixed at 0).

    Not shift-invariant: the codeword of source coordinate 1 starts at target
    coordinate 1 by construction.
    """

    variant = "pushforward"
    is_stationary = False

    def __init__(self, code: FinitaryCode, base):
        if not base.is_stationary:
            raise StochasticityError("pushforward base must be stationary")
        if base.alphabet != code.source:
            raise StochasticityError("pushforward base alphabet must match code source")
        self.code = code
        self.base = base
        self.alphabet = code.target
        self._renewal: np.ndarray | None = None
        self._component_push = None

    def components(self):
        """Per-ergodic-component pushforwards when the base is a mixture."""
        if self._component_push is None:
            if self.base.variant == "mixture":
                self._component_push = tuple(
                    PushforwardModel(self.code, comp) for comp in self.base.components
                )
            else:
                self._component_push = (self,)
        return self._component_push

    def descriptor(self) -> dict:
        return {
            "variant": "pushforward",
            "code": self.code.describe(),
            "base": self.base.descriptor(),
        }

    # -- renewal table: P(codeword boundary at p with owner symbol x) -----

    def _renewal_table(self, p_max: int) -> np.ndarray:
        if self._renewal is not None and self._renewal.shape[0] > p_max:
            return self._renewal
        # grow geometrically: repeated calls with p_max+1 would otherwise
        # rebuild the whole recursion each time
        have = 0 if self._renewal is None else self._renewal.shape[0]
        rows = max(p_max + 1, 2 * have, 256)
        mu, K = self.base.chain_view()
        lens = [self.code.length(x) for x in range(self.code.source.size)]
        B = np.zeros((rows, self.code.source.size))
        B[:have] = self._renewal if have else 0.0
        if not have:
            B[0] = mu
        for p in range(max(have, 1), rows):
            for x in range(self.code.source.size):
                if p - lens[x] >= 0:
                    B[p, x] = float(B[p - lens[x]] @ K[:, x])
        self._renewal = B
        return B


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self, n: int = 1):
        self.used += n
        if self.used > self.limit:
            raise EnumerationBudgetError(
                f"enumeration exceeded budget of {self.limit} nodes"
            )


def _word_at(c: CylinderEvent):
    """Constraint map coordinate -> required symbol id."""
    return {c.start + i: t for i, t in enumerate(c.word.ids)}


def _push_cylinder(push: PushforwardModel, c: CylinderEvent, budget: _Budget) -> float:
    if push.base.variant == "mixture":
        return math.fsum(
            float(w) * _push_cylinder(sub, c, budget)
            for w, sub in zip(push.base.weights, push.components())
        )
    code = push.code
    mu, K = push.base.chain_view()
    req = _word_at(c)
    a, b = c.start, c.end
    lens = [code.length(x) for x in range(code.source.size)]
    maxlen = max(lens)

    def cw_matches(x: int, end_coord: int) -> bool:
        """Whether f(x) laid down ending at end_coord satisfies req."""
        cw = code.codewords[x]
        for k, t in enumerate(cw):
            coord = end_coord - len(cw) + 1 + k
            if coord in req and req[coord] != t:
                return False
        return True

    def right_sum(x_from: int, p: int, first_min_len: int) -> float:
        """Sum over minimal right covers of (p, b] from chain state x_from."""
        total = []

        def rec(state, pos, prob, first):
            budget.spend()
            if pos >= b:
                total.append(prob)
                return
            for x in range(code.source.size):
                lx = lens[x]
                if first and lx < first_min_len:
                    continue
                q = float(K[state, x])
                if q == 0.0 or not cw_matches(x, pos + lx):
                    continue
                rec(x, pos + lx, prob * q, False)

        rec(x_from, p, 1.0, True)
        return math.fsum(total)

    if a >= 1:
        B = push._renewal_table(a - 1 if a - 1 >= 0 else 0)
        acc = []
        for p in range(max(0, a - maxlen), a):
            for x in range(code.source.size):
                base_mass = float(B[p, x])
                if base_mass == 0.0:
                    continue
                acc.append(base_mass * right_sum(x, p, a - p))
        return math.fsum(acc)

    # Left side reaches coordinates <= 0: enumerate minimal left covers.
    acc = []

    def left_rec(chain_ids, lo):
        """chain_ids: (x_{-m}, ..., x_0); lo: leftmost covered coordinate."""
        budget.spend()
        if lo <= a:
            # minimal left cover reached; weight by source window probability
            p0 = float(mu[chain_ids[0]])
            for u, v in zip(chain_ids[:-1], chain_ids[1:]):
                p0 *= float(K[u, v])
            if p0 == 0.0:
                return
            if b >= 1:
                acc.append(p0 * right_sum(chain_ids[-1], 0, 1))
            else:
                acc.append(p0)
            return
        for x in range(code.source.size):
            # lay f(x) ending just left of current coverage
            if cw_matches(x, lo - 1):
                left_rec((x,) + chain_ids, lo - lens[x])

    # x_0's codeword ends at 0; start with each possible x_0.
    for x0 in range(code.source.size):
        if cw_matches(x0, 0):
            left_rec((x0,), 1 - lens[x0])
    return math.fsum(acc)


def cylinder_prob(model, c: CylinderEvent, budget: int = DEFAULT_BUDGET) -> float:
    """Exact probability of a cylinder event under the model."""
    if c.alphabet != model.alphabet:
        raise ValueError("event alphabet does not match the model")
    if model.variant == "iid":
        return float(np.prod(model.p[np.asarray(c.word.ids, dtype=np.int64)]))
    if model.variant == "markov":
        return model.window_prob(c.word.ids)
    if model.variant == "mixture":
        return math.fsum(
            float(w) * cylinder_prob(comp, c, budget)
            for w, comp in zip(model.weights, model.components)
        )
    if model.variant == "pushforward":
        return _push_cylinder(model, c, _Budget(budget))
    if model.is_stationary and hasattr(model, "window_prob"):
        return model.window_prob(c.word.ids)
    raise ValueError(f"unknown model variant {model.variant!r}")


# -- sampling --------------------------------------------------------------


@dataclass(frozen=True)
class PathSample:
    """A sampled window, regenerable bit-exactly from (model, seed, span)."""

    window: Window
    seed: int
    model_digest: str


def model_digest(model) -> str:
    blob = json.dumps(model.descriptor(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _gen(seq: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seq))


def _sample_ids(model, n: int, seq: np.random.SeedSequence) -> np.ndarray:
    """n consecutive symbols of the stationary law, driven by PCG64 uniforms."""
    if model.variant == "iid":
        u = _gen(seq).random(n)
        return _kernels.categorical_draws(np.cumsum(model.p), u)
    if model.variant == "markov":
        u = _gen(seq).random(n)
        cum_pi = np.cumsum(model.pi)
        cum_rows = np.ascontiguousarray(np.cumsum(model.K, axis=1))
        s0 = int(_kernels.categorical_draws(cum_pi, u[:1])[0])
        if n == 1:
            return np.array([s0], dtype=np.int64)
        rest = _kernels.chain_walk(cum_rows, s0, u[1:])
        return np.concatenate(([s0], rest))
    if model.variant == "mixture":
        pick_seq, path_seq = seq.spawn(2)
        u = _gen(pick_seq).random(1)
        k = int(_kernels.categorical_draws(np.cumsum(model.weights), u)[0])
        return _sample_ids(model.components[k], n, path_seq)
    raise ValueError(f"cannot sample symbols from variant {model.variant!r}")


def sample(model, start: int, length: int, seed: int) -> PathSample:
    """Draw a window of the process law, deterministically from the seed."""
    if length < 1:
        raise ValueError("length must be >= 1")
    seq = np.random.SeedSequence(seed)
    end = start + length - 1
    if model.variant == "pushforward":
        m_left = max(0, 1 - start)
        k_right = max(0, end)
        src = _sample_ids(model.base, m_left + k_right, seq)
        flat, off, lens = model.code.arrays()
        coded_left = (
            _kernels.encode_ids(src[:m_left], flat, off, lens)
            if m_left
            else np.empty(0, dtype=np.int64)
        )
        coded_right = (
            _kernels.encode_ids(src[m_left:], flat, off, lens)
            if k_right
            else np.empty(0, dtype=np.int64)
        )
        lo = 1 - len(coded_left)  # leftmost covered coordinate
        coded = np.concatenate((coded_left, coded_right))
        ids = coded[start - lo : end - lo + 1]
        win = Window(model.alphabet, start, ids)
    else:
        ids = _sample_ids(model, length, seq)
        win = Window(model.alphabet, start, ids)
    return PathSample(win, seed, model_digest(model))


def birkhoff_frequency(path, c: CylinderEvent, n: int | None = None) -> Fraction:
    """Empirical frequency of T^i path in c over i = 0..n-1 (exact rational).

    Accepts a PathSample or a bare Window.
    """
    if isinstance(path, PathSample):
        path = path.window
    if path.alphabet != c.alphabet:
        raise ValueError("event alphabet does not match the path")
    m = len(c.word)
    max_n = path.end - m + 2 - c.start
    if c.start < path.start or max_n < 1:
        raise WindowTooShortError("path window admits no full evaluation of the event")
    if n is None:
        n = max_n
    if n < 1 or n > max_n:
        raise WindowTooShortError(f"requested {n} evaluations, window admits {max_n}")
    word = np.asarray(c.word.ids, dtype=np.int64)
    count = _kernels.count_word(
        np.asarray(path.ids, dtype=np.int64), word, c.start - path.start, n
    )
    return Fraction(int(count), int(n))
