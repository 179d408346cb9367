"""Codes: construction, encoding, quasi-period, spread, UD, self-avoidance."""

import numpy as np
import pytest

from normtransport import (
    CodeConstructionError,
    CylinderEvent,
    NonCanonicalCylinderError,
    Window,
    WindowTooShortError,
    check_self_avoiding,
    check_unique_decodability,
    encode,
    factorization_commutes,
    make_comma_embedded,
    make_comma_separated,
    make_generic,
    make_unary,
    quasi_period,
    quasi_period_bounded,
    replay_witness,
    spread,
)


def test_unary_codewords(unary12):
    assert unary12.codewords == ((0, 1), (0, 0, 1))
    assert unary12.source.labels == ("1", "2")
    assert unary12.target.labels == ("0", "1")
    assert unary12.length(0) == 2
    assert unary12.length(1) == 3


def test_unary_rejects_bad_support():
    with pytest.raises(CodeConstructionError):
        make_unary([-1, 2])
    with pytest.raises(CodeConstructionError):
        make_unary([1, 1])


def test_embedded_codewords(embedded):
    # word parts "", "0"; separator 1; both suffixes "0"
    assert embedded.codewords == ((1, 0), (0, 1, 0))
    assert embedded.suffix_len == 1


def test_embedded_separator_in_word_rejected():
    with pytest.raises(CodeConstructionError):
        make_comma_embedded({"a": "1", "b": "01"}, "0", {"a": "0", "b": "0"})


def test_comma_separated_construction():
    code = make_comma_separated({"a": "", "b": "1", "c": "11"}, "0")
    assert code.codewords == ((0,), (1, 0), (1, 1, 0))
    assert code.separator == 0
    assert code.suffix_len == 0


def test_generic_injective_required():
    with pytest.raises(CodeConstructionError):
        make_generic({"a": "01", "b": "01"})


def test_encode_boundaries(unary12):
    xw = Window(unary12.source, 1, (0, 1, 0))  # symbols 1,2,1
    cw = encode(unary12, xw)
    assert cw.window.alphabet == unary12.target
    assert cw.window.start == 1
    assert tuple(cw.window.ids) == (0, 1, 0, 0, 1, 0, 1)
    assert cw.boundaries == (0, 2, 5, 7)


def test_encode_requires_start_one(unary12):
    with pytest.raises(ValueError):
        encode(unary12, Window(unary12.source, 0, (0, 1)))


def test_quasi_period_id_and_label(unary12):
    assert quasi_period(unary12, 0) == 2
    assert quasi_period(unary12, "2") == 3


def test_quasi_period_bounded_agrees(unary12):
    xw = Window(unary12.source, 1, (1, 0, 1, 0, 0, 1, 0, 0))
    assert quasi_period_bounded(unary12, xw, horizon=8) == 3
    short = Window(unary12.source, 1, (1,))
    with pytest.raises(WindowTooShortError):
        quasi_period_bounded(unary12, short, horizon=8)


def test_spread_counts_shifted_hits(unary12):
    # coded stream for (2,1,1,...): 001 01 01 ...
    xw = Window(unary12.source, 1, (1, 0, 0, 0, 0, 0))
    B = CylinderEvent(Window(unary12.target, 1, ()).alphabet, 1, unary12.target.word("0"))
    # L = 3 copies shifted by 0,1,2; coded = 0 0 1 0 1 0 1 ...
    assert spread(unary12, xw, B) == 2


def test_spread_rejects_noncanonical_event(unary12):
    xw = Window(unary12.source, 1, (0, 0, 0, 0))
    B = CylinderEvent(unary12.target, 0, unary12.target.word("0"))
    with pytest.raises(NonCanonicalCylinderError):
        spread(unary12, xw, B)


def test_spread_window_too_short(unary12):
    xw = Window(unary12.source, 1, (1,))
    B = CylinderEvent(unary12.target, 3, unary12.target.word("01"))
    with pytest.raises(WindowTooShortError):
        spread(unary12, xw, B)


def test_factorization_commutes_seeded(unary12, embedded):
    rng = np.random.default_rng(11)
    for code in (unary12, embedded):
        for _ in range(25):
            n = int(rng.integers(4, 12))
            ids = tuple(int(v) for v in rng.integers(0, 2, size=n))
            xw = Window(code.source, 1, ids)
            assert factorization_commutes(code, xw, steps=n - 1)


def test_ud_verdict_unique(unary12, embedded):
    assert check_unique_decodability(unary12).unique
    assert check_unique_decodability(embedded).unique


def test_ud_witness_both_parses():
    code = make_generic({"a": "0", "b": "01", "c": "10"})
    v = check_unique_decodability(code)
    assert not v.unique
    assert tuple(v.witness.ids) == (0, 1, 0)
    p1, p2 = v.parses
    assert p1 != p2
    for parse in (p1, p2):
        flat = tuple(t for x in parse for t in code.codewords[x])
        assert flat == (0, 1, 0)


def test_self_avoiding_pass(unary12, embedded):
    for code in (unary12, embedded):
        v = check_self_avoiding(code, depth=8)
        assert v.passed
        assert v.witness is None


def test_self_avoiding_violation_and_replay():
    # "01"/"10": shifting the coded stream by 1 re-tiles it with the
    # opposite codeword, landing a boundary strictly inside a codeword.
    code = make_generic({"a": "01", "b": "10"})
    v = check_self_avoiding(code, depth=6)
    assert not v.passed
    assert v.witness is not None
    assert 1 <= v.witness.shift
    assert replay_witness(code, v.witness)


def test_suffix_code_self_avoiding():
    # all codewords end in the only 0: a comma code read right-to-left,
    # so no shifted re-parse can land inside a word
    code = make_generic({"a": "0", "b": "10", "c": "110"})
    assert check_unique_decodability(code).unique
    assert check_self_avoiding(code, depth=8).passed


def test_describe_mentions_kind(unary12):
    d = unary12.describe()
    assert d["kind"] == "unary"
    assert d["codewords"] == {"1": "01", "2": "001"}
