"""Kernel backend selection.

The compiled extension is preferred when the build produced it; otherwise the
NumPy fallback is used.  Both expose the same functions with bit-identical
outputs, so selection never changes results, only speed.  ``use_backend`` lets
benchmarks and tests pin a backend explicitly.
"""

from __future__ import annotations

from . import _pure

try:  # pragma: no cover - exercised only when the extension is built
    from . import _native

    _DEFAULT = _native
except ImportError:  # pragma: no cover
    _native = None
    _DEFAULT = _pure

_active = _DEFAULT


def available_backends() -> tuple[str, ...]:
    return ("python", "native") if _native is not None else ("python",)


def backend_name() -> str:
    return _active.BACKEND


def get_backend(name: str):
    """Return the backend module for 'python', 'native', or 'default'."""
    if name == "python":
        return _pure
    if name == "native":
        if _native is None:
            raise ValueError("native backend not built")
        return _native
    if name == "default":
        return _DEFAULT
    raise ValueError(f"unknown backend {name!r}")


def use_backend(name: str) -> None:
    """Pin the active backend (used by benchmarks and equivalence tests)."""
    global _active
    _active = get_backend(name)


def categorical_draws(cum, u):
    return _active.categorical_draws(cum, u)


def chain_walk(cum_rows, s0, u):
    return _active.chain_walk(cum_rows, s0, u)


def encode_ids(path, cw_flat, cw_off, cw_len):
    return _active.encode_ids(path, cw_flat, cw_off, cw_len)


def find_word(path, word):
    return _active.find_word(path, word)


def count_word(path, word, start, n):
    return _active.count_word(path, word, start, n)
