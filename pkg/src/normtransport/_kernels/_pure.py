"""NumPy fallback implementations of the hot-loop kernels.

Semantics are bit-identical to the compiled versions in ``_native``: both
backends consume the same pre-generated uniforms and select the next state as
the smallest j with u < cum[j] (right-bisection), clamped to the last state.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def categorical_draws(cum: np.ndarray, u: np.ndarray) -> np.ndarray:
    """IID draws from a categorical law given its cumulative vector."""
    out = np.searchsorted(cum, u, side="right")
    np.clip(out, 0, len(cum) - 1, out=out)
    return out.astype(np.int64)


def chain_walk(cum_rows: np.ndarray, s0: int, u: np.ndarray) -> np.ndarray:
    """Markov walk: states s_1..s_n driven by uniforms, starting from s0.

    cum_rows[i] is the cumulative transition vector out of state i.
    """
    n = len(u)
    out = np.empty(n, dtype=np.int64)
    k = cum_rows.shape[1]
    s = int(s0)
    for t in range(n):
        s = int(np.searchsorted(cum_rows[s], u[t], side="right"))
        if s >= k:
            s = k - 1
        out[t] = s
    return out


def encode_ids(
    path: np.ndarray, cw_flat: np.ndarray, cw_off: np.ndarray, cw_len: np.ndarray
) -> np.ndarray:
    """Concatenate codewords for each source symbol along the path.

    cw_flat holds all codewords back to back; codeword of symbol x occupies
    cw_flat[cw_off[x] : cw_off[x] + cw_len[x]].
    """
    lens = cw_len[path]
    total = int(lens.sum())
    out = np.empty(total, dtype=np.int64)
    ends = np.cumsum(lens)
    starts = ends - lens
    # Build the index into cw_flat for every output slot in one shot.
    pos = np.arange(total, dtype=np.int64) - np.repeat(starts, lens)
    out[:] = cw_flat[np.repeat(cw_off[path], lens) + pos]
    return out


def find_word(path: np.ndarray, word: np.ndarray) -> np.ndarray:
    """Indices i (0-based into path) where word occurs starting at i."""
    m = len(word)
    n = len(path)
    if n < m:
        return np.empty(0, dtype=np.int64)
    hit = path[: n - m + 1] == word[0]
    for k in range(1, m):
        hit &= path[k : n - m + 1 + k] == word[k]
    return np.flatnonzero(hit).astype(np.int64)


def count_word(path: np.ndarray, word: np.ndarray, start: int, n: int) -> int:
    """Number of occurrences of word at offsets start..start+n-1 of path."""
    m = len(word)
    seg = path[start : start + n + m - 1]
    hits = find_word(seg, word)
    return int(np.count_nonzero(hits < n))
