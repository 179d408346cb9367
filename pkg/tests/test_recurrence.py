"""Return times: exact laws, the indicator bridge, parsing, diagnostics."""

import io
import math

import numpy as np
import pytest

from normtransport import (
    CylinderEvent,
    EventSet,
    IndicatorModel,
    InsufficientVisitsError,
    RangeNotCoveredError,
    Window,
    birkhoff_gap_agreement,
    event_prob,
    exact_block_law,
    gap_functional_stats,
    gap_law_table,
    gap_stationarity_report,
    kac_expected_return,
    read_trace,
    recurrence_joint_law,
    recurrence_parse,
    recurrence_times,
    return_map_invariance,
    sample,
    sample_recurrence_trace,
    unary_bridge,
    write_trace,
)


def _state2(two_state):
    return EventSet.from_states(two_state.alphabet, ["2"])


def _statexz(markov3):
    return EventSet.from_states(markov3.alphabet, ["0", "2"])


def test_event_set_states(two_state):
    C = _state2(two_state)
    win = Window(two_state.alphabet, -2, (0, 1, 0, 0, 1, 1))
    assert list(C.visit_positions(win)) == [-1, 2, 3]
    assert C.pattern_len == 1


def test_event_set_from_cylinder(two_state):
    w = two_state.alphabet.word(["2", "1"])
    C = EventSet.from_event(CylinderEvent(two_state.alphabet, 0, w))
    win = Window(two_state.alphabet, 0, (1, 0, 1, 1, 0))
    # "21" occurs at 0 and 3
    assert list(C.visit_positions(win)) == [0, 3]
    assert C.pattern_len == 2


def test_recurrence_times_known_path(two_state):
    C = _state2(two_state)
    win = Window(two_state.alphabet, -3, (1, 0, 0, 1, 0, 0, 1, 1))
    tr = recurrence_times(win, C, max_k=2, min_k=-1)
    assert tr.anchor_in_C
    assert tr.positions == (-3, 0, 3, 4)
    assert tr.gaps() == (3, 3, 1)
    assert tr.complete


def test_recurrence_times_partial(two_state):
    C = _state2(two_state)
    win = Window(two_state.alphabet, 0, (1, 0, 0, 0))
    tr = recurrence_times(win, C, max_k=5)
    assert tr.anchor_in_C and tr.found_forward == 0
    assert not tr.complete


def test_recurrence_times_requires_origin(two_state):
    C = _state2(two_state)
    win = Window(two_state.alphabet, 3, (1, 0, 1))
    with pytest.raises(RangeNotCoveredError):
        recurrence_times(win, C, max_k=1)


def test_kac_identity_exact(two_state, coin, markov3):
    assert kac_expected_return(two_state, _state2(two_state)) == pytest.approx(
        6.0, abs=1e-9
    )
    Ch = EventSet.from_states(coin.alphabet, ["h"])
    assert kac_expected_return(coin, Ch) == pytest.approx(4.0, abs=1e-12)
    # multi-state event: P(C) = pi(0) + pi(2), return mean is its reciprocal
    Cxz = _statexz(markov3)
    assert kac_expected_return(markov3, Cxz) * event_prob(markov3, Cxz) == (
        pytest.approx(1.0, abs=1e-12)
    )


def test_kac_identity_cylinder_event(two_state):
    w = two_state.alphabet.word(["2", "1"])
    C = EventSet.from_event(CylinderEvent(two_state.alphabet, 0, w))
    p = event_prob(two_state, C)
    assert p == pytest.approx(1 / 6 * 0.5, abs=1e-14)  # pi("2") K("2","1")
    assert kac_expected_return(two_state, C) == pytest.approx(1 / p, abs=1e-9)


def test_joint_law_values(two_state):
    C = _state2(two_state)
    # from state 2: stay with prob 0.5 (gap 1) ...
    assert recurrence_joint_law(two_state, C, (1,)) == pytest.approx(0.5, abs=1e-14)
    # ... or leave and come back in one step: 0.5 * 0.1 (gap 2)
    assert recurrence_joint_law(two_state, C, (2,)) == pytest.approx(0.05, abs=1e-14)
    # independence across gaps fails in general but holds from a singleton
    assert recurrence_joint_law(two_state, C, (1, 2)) == pytest.approx(
        0.5 * 0.05, abs=1e-14
    )


def test_gap_law_mass_and_mean(two_state):
    C = _state2(two_state)
    law = gap_law_table(two_state, C, tail_tol=1e-14)
    assert law.total() + law.tail == pytest.approx(1.0, abs=1e-12)
    assert law.mean() == pytest.approx(6.0, abs=1e-9)
    assert law.probs[1] == pytest.approx(0.5, abs=1e-14)


def test_exact_block_law_consistency(two_state):
    C = _state2(two_state)
    law2, dropped = exact_block_law(two_state, C, block_len=2, tail_tol=1e-10)
    assert dropped < 1e-8
    assert math.fsum(law2.values()) == pytest.approx(1.0, abs=1e-8)
    assert law2[(1, 2)] == pytest.approx(
        recurrence_joint_law(two_state, C, (1, 2)), abs=1e-10
    )


def test_return_map_invariance_zero(two_state, markov3):
    assert return_map_invariance(two_state, _state2(two_state)) == 0.0
    assert return_map_invariance(markov3, _statexz(markov3)) < 1e-15
    w = two_state.alphabet.word(["2", "1"])
    C = EventSet.from_event(CylinderEvent(two_state.alphabet, 0, w))
    assert return_map_invariance(two_state, C) < 1e-15


def test_unary_bridge_two_state(two_state):
    C = _state2(two_state)
    rep = unary_bridge(two_state, C, r_max=10, j_max=3)
    assert rep.passed
    assert rep.max_residual <= 1e-9
    assert rep.boundary_prob == pytest.approx(event_prob(two_state, C), abs=1e-12)
    assert rep.normalization_residual <= 1e-9
    assert rep.gap_law[1] == pytest.approx(0.5, abs=1e-9)
    assert rep.implied_prob((2, 1)) == pytest.approx(
        recurrence_joint_law(two_state, C, (2, 1)), abs=1e-9
    )


def test_unary_bridge_markov3(markov3):
    rep = unary_bridge(markov3, _statexz(markov3), r_max=8, j_max=2)
    assert rep.passed
    assert rep.max_residual <= 1e-9


def test_indicator_model_window_prob(two_state):
    C = _state2(two_state)
    ind = IndicatorModel(two_state, C)
    assert ind.window_prob([1]) == pytest.approx(1 / 6, abs=1e-12)
    assert ind.window_prob([1, 1]) == pytest.approx(
        recurrence_joint_law(two_state, C, (1,)) * (1 / 6), abs=1e-12
    )


def test_gap_functional_stats_frozen(two_state, markov3):
    st = gap_functional_stats(two_state, _state2(two_state), cap=10)
    assert st.mean == pytest.approx(4.062897555000002, abs=1e-9)
    assert st.variance == pytest.approx(13.945868102575027, abs=1e-9)
    # gaps from a singleton are independent, no autocovariance correction
    assert st.long_run_variance == pytest.approx(st.variance, abs=1e-9)
    # multi-state event: values cross-checked against a 4e5-gap Monte Carlo
    st3 = gap_functional_stats(markov3, _statexz(markov3), cap=10)
    assert st3.mean == pytest.approx(18 / 13, abs=1e-8)  # kac, tail under cap
    assert st3.variance == pytest.approx(0.3221564689053255, abs=1e-9)
    assert st3.long_run_variance == pytest.approx(0.3357725498583421, abs=1e-9)
    assert st3.long_run_variance > st3.variance  # returns are correlated here


def test_sample_recurrence_trace_deterministic(two_state):
    C = _state2(two_state)
    t1, p1 = sample_recurrence_trace(two_state, C, n_gaps=50, seed=17)
    t2, p2 = sample_recurrence_trace(two_state, C, n_gaps=50, seed=17)
    assert t1.positions == t2.positions
    assert tuple(p1.window.ids) == tuple(p2.window.ids)
    assert t1.found_forward >= 52


def test_gap_stationarity_report(two_state):
    C = _state2(two_state)
    trace, _ = sample_recurrence_trace(two_state, C, n_gaps=20_000, seed=5)
    law = gap_law_table(two_state, C, tail_tol=1e-12)
    exact = {(r,): p for r, p in law.probs.items()}
    rep = gap_stationarity_report(trace, 1, exact_law=exact)
    assert rep.tv_offset < 0.02
    assert rep.tv_exact < 0.02
    assert abs(math.fsum(rep.blocks_offset0.values()) - 1.0) < 1e-12


def test_birkhoff_gap_agreement(two_state):
    C = _state2(two_state)
    rep = birkhoff_gap_agreement(two_state, C, seeds=(17, 18), n_gaps=20_000)
    assert rep.passed
    assert rep.max_deviation <= rep.sigma_factor * rep.sigma_mean


def test_recurrence_parse_identities(two_state):
    C = _state2(two_state)
    B = CylinderEvent(two_state.alphabet, 0, two_state.alphabet.word("2"))
    path = sample(two_state, 0, 3000, seed=9)
    parse = recurrence_parse(path, B)
    assert parse.gaps() == tuple(
        b - a for a, b in zip(parse.boundaries, parse.boundaries[1:])
    )
    concat = parse.concat()
    assert concat.start == parse.boundaries[0] + 1
    assert concat.end == parse.boundaries[-1]
    seg = path.window.segment(concat.start, concat.end)
    assert tuple(concat.ids) == tuple(int(v) for v in seg)
    # every word ends with the pattern and contains it nowhere else
    for w in parse.words:
        two = two_state.alphabet.id_of("2")
        assert w.ids[-1] == two
        assert all(v != two for v in w.ids[:-1])


def test_recurrence_parse_needs_visits(two_state):
    B = CylinderEvent(two_state.alphabet, 0, two_state.alphabet.word("2"))
    win = Window(two_state.alphabet, 0, (0, 0, 0, 0))
    with pytest.raises(InsufficientVisitsError):
        recurrence_parse(win, B)


def test_recurrence_parse_rejects_shifted_event(two_state):
    B = CylinderEvent(two_state.alphabet, 2, two_state.alphabet.word("2"))
    win = Window(two_state.alphabet, 0, (1, 1, 1, 1))
    with pytest.raises(ValueError):
        recurrence_parse(win, B)


def test_trace_io_roundtrip(two_state):
    C = _state2(two_state)
    trace, _ = sample_recurrence_trace(two_state, C, n_gaps=25, seed=31)
    buf = io.StringIO()
    write_trace(trace, buf, model=two_state, event=C, seed=31)
    back, header = read_trace(io.StringIO(buf.getvalue()))
    assert back.positions == trace.positions
    assert back.anchor_in_C == trace.anchor_in_C
    assert header["seed"] == "31"
    assert "model" in header and "event" in header
