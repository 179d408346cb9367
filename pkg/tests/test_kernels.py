"""Backend equivalence: compiled and pure kernels must agree bit for bit."""

import numpy as np
import pytest

from normtransport import _kernels

pytestmark = pytest.mark.skipif(
    "native" not in _kernels.available_backends(),
    reason="compiled extension not built",
)


def _backends():
    return _kernels.get_backend("python"), _kernels.get_backend("native")


def test_native_backend_is_default():
    assert _kernels.get_backend("default").BACKEND == "native"
    assert _kernels.backend_name() == "native"


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        _kernels.get_backend("fortran")


def test_categorical_draws_agree():
    py, nat = _backends()
    rng = np.random.default_rng(101)
    for _ in range(20):
        k = int(rng.integers(2, 7))
        p = rng.dirichlet(np.ones(k))
        cum = np.cumsum(p)
        u = rng.random(int(rng.integers(1, 2000)))
        a = py.categorical_draws(cum, u)
        b = nat.categorical_draws(cum, u)
        assert a.dtype == b.dtype == np.int64
        assert np.array_equal(a, b)


def test_categorical_draws_boundary_uniforms():
    py, nat = _backends()
    cum = np.array([0.25, 0.75, 1.0])
    u = np.array([0.0, 0.25, 0.7499999999, 0.75, 1.0])
    assert np.array_equal(py.categorical_draws(cum, u), nat.categorical_draws(cum, u))


def test_chain_walk_agree():
    py, nat = _backends()
    rng = np.random.default_rng(202)
    for _ in range(10):
        k = int(rng.integers(2, 5))
        K = rng.dirichlet(np.ones(k), size=k)
        cum_rows = np.cumsum(K, axis=1)
        s0 = int(rng.integers(0, k))
        u = rng.random(int(rng.integers(1, 5000)))
        a = py.chain_walk(cum_rows, s0, u)
        b = nat.chain_walk(cum_rows, s0, u)
        assert np.array_equal(a, b)


def test_encode_ids_agree():
    py, nat = _backends()
    rng = np.random.default_rng(303)
    cw_flat = np.array([0, 1, 0, 0, 1, 1, 0], dtype=np.int64)  # "01","001","10"
    cw_off = np.array([0, 2, 5], dtype=np.int64)
    cw_len = np.array([2, 3, 2], dtype=np.int64)
    for _ in range(20):
        path = rng.integers(0, 3, size=int(rng.integers(0, 400))).astype(np.int64)
        a = py.encode_ids(path, cw_flat, cw_off, cw_len)
        b = nat.encode_ids(path, cw_flat, cw_off, cw_len)
        assert np.array_equal(a, b)
        assert len(a) == int(cw_len[path].sum())


def test_find_word_agree():
    py, nat = _backends()
    rng = np.random.default_rng(404)
    for _ in range(30):
        path = rng.integers(0, 2, size=int(rng.integers(0, 300))).astype(np.int64)
        m = int(rng.integers(1, 5))
        word = rng.integers(0, 2, size=m).astype(np.int64)
        a = py.find_word(path, word)
        b = nat.find_word(path, word)
        assert np.array_equal(a, b)
        for i in a:
            assert np.array_equal(path[i : i + m], word)


def test_find_word_shorter_than_word():
    py, nat = _backends()
    path = np.array([1], dtype=np.int64)
    word = np.array([1, 0], dtype=np.int64)
    assert len(py.find_word(path, word)) == 0
    assert len(nat.find_word(path, word)) == 0


def test_count_word_agree():
    py, nat = _backends()
    rng = np.random.default_rng(505)
    for _ in range(30):
        path = rng.integers(0, 2, size=500).astype(np.int64)
        word = rng.integers(0, 2, size=int(rng.integers(1, 4))).astype(np.int64)
        start = int(rng.integers(0, 100))
        n = int(rng.integers(1, 300))
        assert py.count_word(path, word, start, n) == nat.count_word(
            path, word, start, n
        )


def test_use_backend_roundtrip():
    before = _kernels.backend_name()
    try:
        _kernels.use_backend("python")
        assert _kernels.backend_name() == "python"
        cum = np.array([0.5, 1.0])
        u = np.array([0.1, 0.9])
        assert np.array_equal(
            _kernels.categorical_draws(cum, u), np.array([0, 1], dtype=np.int64)
        )
    finally:
        _kernels.use_backend(before)
    assert _kernels.backend_name() == before
