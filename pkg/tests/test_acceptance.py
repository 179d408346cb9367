"""Acceptance gate: eleven named criteria, one printed verdict line each.

Each test prints ``criterion NN PASS/FAIL <label>`` to the real stdout so the
verdict survives pytest's capture; tolerances and runtime bounds are asserted
inside the tests themselves.
"""

import math
import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest

from normtransport import (
    CylinderEvent,
    EventSet,
    IIDModel,
    PushforwardModel,
    Window,
    birkhoff_gap_agreement,
    boundary_prob,
    cesaro_suite,
    check_self_avoiding,
    check_unique_decodability,
    code_suite,
    cylinder_prob,
    decomposition_check,
    event_prob,
    expected_quasi_period,
    forward,
    gap_functional_stats,
    gap_law_table,
    gap_stationarity_report,
    kac_expected_return,
    make_comma_separated,
    make_generic,
    normalization_residual,
    normalization_suite,
    plain_transport_control,
    recurrence_parse,
    recurrence_times,
    replay_witness,
    roundtrip_suite,
    sample,
    sample_recurrence_trace,
    shift_window,
    stationarity_suite,
    transported_model,
    unary_bridge,
)


def _line(n, label, ok):
    print(
        "criterion %02d %s %s" % (n, "PASS" if ok else "FAIL", label),
        file=sys.__stdout__,
        flush=True,
    )


@contextmanager
def _criterion(n, label):
    try:
        yield
    except BaseException:
        _line(n, label, False)
        raise
    _line(n, label, True)


def test_criterion_01_transport_stationarity(unary12, iid12, unary3, markov3):
    with _criterion(1, "transported law is shift-stationary"):
        t0 = time.monotonic()
        for code, model in ((unary12, iid12), (unary3, markov3)):
            rep = stationarity_suite(code, model, max_len=4, max_shift=3)
            assert rep.passed, rep.render(failures_only=True)
        assert time.monotonic() - t0 < 10.0


def test_criterion_02_roundtrip(unary12, iid12, unary3, markov3, embedded):
    with _criterion(2, "inverse of forward recovers the source law"):
        t0 = time.monotonic()
        pairs = (
            (unary12, iid12),
            (unary3, markov3),
            (embedded, IIDModel(embedded.source, [0.6, 0.4])),
        )
        for code, model in pairs:
            rep = roundtrip_suite(code, model, depth=12, max_len=3)
            assert rep.passed, rep.render(failures_only=True)
        assert time.monotonic() - t0 < 30.0


def test_criterion_03_normalization(unary12, iid12, unary3, markov3, embedded):
    with _criterion(3, "quasi-period mean times boundary probability is 1"):
        assert expected_quasi_period(unary12, iid12) == pytest.approx(2.5, abs=0)
        b = boundary_prob(unary12, transported_model(unary12, iid12), depth=12)
        assert abs(b.mid - 0.4) <= 1e-9 and b.width <= 1e-9
        rep = normalization_suite(
            unary12,
            iid12,
            n_symbols=1_000_000,
            seed=2026,
            expected_quasi_period_mean=2.5,
        )
        assert rep.passed, rep.render(failures_only=True)
        for code, model in (
            (unary3, markov3),
            (embedded, IIDModel(embedded.source, [0.6, 0.4])),
        ):
            assert normalization_residual(code, model) <= 1e-9


def test_criterion_04_plain_pushforward_is_not_stationary(unary12, iid12):
    with _criterion(4, "unnormalized pushforward fails the stationarity control"):
        push = PushforwardModel(unary12, iid12)
        one = push.alphabet.word("1")
        assert cylinder_prob(push, CylinderEvent(push.alphabet, 1, one)) == 0.0
        assert cylinder_prob(push, CylinderEvent(push.alphabet, 0, one)) == 1.0
        control = plain_transport_control(unary12, iid12, max_len=2, max_shift=2)
        assert not control.passed


def test_criterion_05_cesaro_convergence(unary12, iid12):
    with _criterion(5, "shift averages of the pushforward converge to transport"):
        t0 = time.monotonic()
        rep = cesaro_suite(unary12, iid12, ns=(256, 1024, 4096, 10_000))
        assert rep.passed, rep.render(failures_only=True)
        assert time.monotonic() - t0 < 60.0


def test_criterion_06_mean_return_identity(two_state, coin):
    with _criterion(6, "expected return time is the reciprocal event mass"):
        fixtures = (
            (two_state, EventSet.from_states(two_state.alphabet, ["2"]), 6.0, 17),
            (coin, EventSet.from_states(coin.alphabet, ["h"]), 4.0, 21),
        )
        for model, C, expect, seed in fixtures:
            kac = kac_expected_return(model, C)
            assert abs(kac - expect) <= 1e-9
            assert abs(kac * event_prob(model, C) - 1.0) <= 1e-9
            n = 100_000
            trace, _ = sample_recurrence_trace(model, C, n_gaps=n, seed=seed)
            gaps = trace.gaps()[:n]
            st = gap_functional_stats(
                model, C, cap=gap_law_table(model, C).r_max
            )
            sigma = math.sqrt(st.long_run_variance / n)
            mc = math.fsum(gaps) / n
            assert abs(mc - kac) <= 4 * sigma + 1e-12


def test_criterion_07_gap_law_through_unary_code(two_state, coin):
    with _criterion(7, "coded-window gap law equals the exact return law"):
        t0 = time.monotonic()
        for model, C in (
            (two_state, EventSet.from_states(two_state.alphabet, ["2"])),
            (coin, EventSet.from_states(coin.alphabet, ["h"])),
        ):
            rep = unary_bridge(model, C, r_max=10, j_max=3, tolerance=1e-9)
            assert rep.passed
            assert rep.max_residual <= 1e-9
        assert time.monotonic() - t0 < 60.0


def test_criterion_08_seed_agreement(two_state, coin):
    with _criterion(8, "independent seeds agree with the law and each other"):
        fixtures = (
            (two_state, EventSet.from_states(two_state.alphabet, ["2"]), (17, 18)),
            (coin, EventSet.from_states(coin.alphabet, ["h"]), (21, 22)),
        )
        for model, C, seeds in fixtures:
            law = gap_law_table(model, C, tail_tol=1e-12)
            exact = {(r,): p for r, p in law.probs.items()}
            for seed in seeds:
                trace, _ = sample_recurrence_trace(model, C, n_gaps=100_000, seed=seed)
                rep = gap_stationarity_report(trace, 1, exact_law=exact)
                assert rep.tv_exact <= 0.01
            agree = birkhoff_gap_agreement(model, C, seeds=seeds, n_gaps=100_000)
            assert agree.passed


def test_criterion_09_mixture_decomposition(unary12, mixture12):
    with _criterion(9, "mixture transport decomposes by component, not pooled"):
        B = CylinderEvent(unary12.target, 1, unary12.target.word("1"))
        rep = decomposition_check(unary12, mixture12, B)
        manual = math.fsum(
            w * forward(unary12, comp, B).value
            for w, comp in zip(mixture12.weights, mixture12.components)
        )
        assert abs(rep.decomposition_value - manual) <= 1e-12
        assert abs(rep.decomposition_value - (0.3 * 0.5 + 0.7 / 3)) <= 1e-12
        assert abs(rep.pooled_value - 1 / 2.7) <= 1e-12
        assert abs(rep.decomposition_value - rep.pooled_value) >= 0.01


def test_criterion_10_code_properties(embedded):
    with _criterion(10, "code checkers give the fixture verdicts"):
        t0 = time.monotonic()
        comma = make_comma_separated({"a": "", "b": "1", "c": "11"}, "0")
        swap = make_generic({"a": "01", "b": "10"})
        sp_bad = make_generic({"a": "0", "b": "01", "c": "10"})
        suffix = make_generic({"a": "0", "b": "10", "c": "110"})
        assert check_self_avoiding(comma, depth=8).passed
        assert check_self_avoiding(embedded, depth=8).passed
        v = check_self_avoiding(swap, depth=4)
        assert not v.passed and v.witness is not None
        assert replay_witness(swap, v.witness)
        ud = check_unique_decodability(sp_bad)
        assert not ud.unique
        assert tuple(ud.witness.ids) == (0, 1, 0)
        assert check_unique_decodability(suffix).unique
        rep = code_suite(
            [
                ("comma", comma, True, True),
                ("embedded", embedded, True, True),
                ("swap", swap, False, True),
                ("sp-ambiguous", sp_bad, False, False),
                ("suffix", suffix, True, True),
            ]
        )
        assert rep.passed, rep.render(failures_only=True)
        assert time.monotonic() - t0 < 5.0


def test_criterion_11_parse_concat_identities(two_state, coin):
    with _criterion(11, "visit parsing and concatenation invert each other"):
        fixtures = (
            (two_state, "2", 9_000_000),
            (coin, "h", 9_100_000),
        )
        for model, label, seed0 in fixtures:
            B = CylinderEvent(model.alphabet, 0, model.alphabet.word(label))
            C = EventSet.from_event(B)
            kac = kac_expected_return(model, C)
            length = int(12 * kac) + 8
            usable = 0
            for i in range(1000):
                path = sample(model, 0, length, seed=seed0 + i)
                win = path.window
                if len(C.visit_positions(win)) < 3:
                    continue
                usable += 1
                parse = recurrence_parse(win, B)
                bounds = parse.boundaries
                # concatenate after parse: the words tile the stream exactly
                concat = parse.concat()
                seg = win.segment(concat.start, concat.end)
                assert tuple(concat.ids) == tuple(int(v) for v in seg)
                assert parse.gaps() == tuple(
                    b - a for a, b in zip(bounds, bounds[1:])
                )
                # parse after concatenate: re-parsing the tiled stream
                # returns the same words (the first visit is consumed as
                # the new anchor)
                again = recurrence_parse(concat, B)
                assert again.words == parse.words[1:]
                assert again.boundaries == bounds[1:]
                # first word length is the first return time from the anchor
                anchored = shift_window(win, bounds[0])
                tr = recurrence_times(anchored, C, max_k=1)
                assert tr.anchor_in_C
                assert tr.positions[1] == len(parse.words[0])
            assert usable >= 950, usable
