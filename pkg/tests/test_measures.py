"""Process laws: exact cylinder probabilities, pushforwards, sampling."""

from fractions import Fraction

import numpy as np
import pytest

from normtransport import (
    CylinderEvent,
    IIDModel,
    MarkovModel,
    MixtureModel,
    PushforwardModel,
    StochasticityError,
    Window,
    birkhoff_frequency,
    cylinder_prob,
    model_digest,
    sample,
    stationary_distribution,
)


def _cyl(model, start, labels):
    return CylinderEvent(model.alphabet, start, model.alphabet.word(labels))


def test_stationary_distribution_two_state(two_state):
    pi = stationary_distribution(two_state.K)
    assert np.allclose(pi, [5 / 6, 1 / 6], atol=1e-14)
    assert pi @ two_state.K == pytest.approx(list(pi), abs=1e-15)


def test_iid_window_prob(iid12):
    assert iid12.window_prob((0, 1, 0)) == pytest.approx(0.125, abs=0)
    assert iid12.window_prob(()) == 1.0


def test_iid_rejects_bad_vector(unary12):
    with pytest.raises(StochasticityError):
        IIDModel(unary12.source, [0.6, 0.6])
    with pytest.raises(StochasticityError):
        IIDModel(unary12.source, [1.2, -0.2])


def test_iid_allows_point_mass(unary12):
    m = IIDModel(unary12.source, [1.0, 0.0])
    assert m.window_prob((0, 0)) == 1.0
    assert m.window_prob((1,)) == 0.0


def test_markov_rejects_nonstochastic(two_state):
    with pytest.raises(StochasticityError):
        MarkovModel(two_state.alphabet, [[0.9, 0.2], [0.5, 0.5]])


def test_cylinder_prob_shift_invariance(markov3):
    w = markov3.alphabet.word(["1", "2"])
    p1 = cylinder_prob(markov3, CylinderEvent(markov3.alphabet, 1, w))
    for s in (-3, 0, 5, 40):
        ps = cylinder_prob(markov3, CylinderEvent(markov3.alphabet, s, w))
        assert ps == pytest.approx(p1, abs=1e-15)


def test_markov_pair_probability(two_state):
    # pi("1") K("1","2") = 5/6 * 0.1
    got = cylinder_prob(two_state, _cyl(two_state, 1, ["1", "2"]))
    assert got == pytest.approx(5 / 6 * 0.1, abs=1e-15)


def test_mixture_weights_window(mixture12):
    # point masses: only the all-1 and all-2 windows carry mass
    assert mixture12.window_prob((0, 0)) == pytest.approx(0.3, abs=0)
    assert mixture12.window_prob((1, 1, 1)) == pytest.approx(0.7, abs=0)
    assert mixture12.window_prob((0, 1)) == 0.0


def test_mixture_weight_validation(iid12):
    with pytest.raises(StochasticityError):
        MixtureModel([0.5, 0.6], [iid12, iid12])


def test_pushforward_start_parity(unary12, iid12):
    push = PushforwardModel(unary12, iid12)
    # coded streams start with codeword boundary at 0, all codewords "0…1":
    # coordinate 1 is always a 0, never a 1
    one = push.alphabet.word("1")
    assert cylinder_prob(push, CylinderEvent(push.alphabet, 1, one)) == 0.0
    zero = push.alphabet.word("0")
    assert cylinder_prob(push, CylinderEvent(push.alphabet, 1, zero)) == 1.0


def test_pushforward_longer_word(unary12, iid12):
    push = PushforwardModel(unary12, iid12)
    # P(coded[1..2] = "01"): first codeword is "01" iff source symbol is 1
    w = push.alphabet.word("01")
    assert cylinder_prob(push, CylinderEvent(push.alphabet, 1, w)) == pytest.approx(
        0.5, abs=1e-15
    )


def test_renewal_growth_matches_bulk(unary12, iid12):
    # incremental queries must agree with a cold bulk build
    inc = PushforwardModel(unary12, iid12)
    w = inc.alphabet.word("01")
    vals_inc = [
        cylinder_prob(inc, CylinderEvent(inc.alphabet, s, w)) for s in range(1, 40)
    ]
    bulk = PushforwardModel(unary12, iid12)
    bulk._renewal_table(100)
    vals_bulk = [
        cylinder_prob(bulk, CylinderEvent(bulk.alphabet, s, w)) for s in range(1, 40)
    ]
    assert vals_inc == vals_bulk


def test_pushforward_components_mixture(unary12, mixture12):
    push = PushforwardModel(unary12, mixture12)
    parts = push.components()
    assert len(parts) == 2
    weights = mixture12.weights
    assert list(weights) == pytest.approx([0.3, 0.7], abs=0)
    w = push.alphabet.word("0")
    c = CylinderEvent(push.alphabet, 2, w)
    mixed = sum(wt * cylinder_prob(comp, c) for wt, comp in zip(weights, parts))
    assert cylinder_prob(push, c) == pytest.approx(mixed, abs=1e-15)


def test_sample_deterministic(markov3):
    a = sample(markov3, 1, 500, seed=99)
    b = sample(markov3, 1, 500, seed=99)
    assert tuple(a.window.ids) == tuple(b.window.ids)
    assert a.model_digest == b.model_digest == model_digest(markov3)
    c = sample(markov3, 1, 500, seed=100)
    assert tuple(a.window.ids) != tuple(c.window.ids)


def test_sample_pushforward_covers_negative(unary12, iid12):
    push = PushforwardModel(unary12, iid12)
    ps = sample(push, -5, 20, seed=3)
    assert ps.window.start == -5
    assert ps.window.end == 14
    assert set(int(v) for v in ps.window.ids) <= {0, 1}


def test_birkhoff_frequency_exact_rational(iid12):
    win = Window(iid12.alphabet, 1, (0, 1, 0, 0, 1, 1))
    c = CylinderEvent(iid12.alphabet, 1, iid12.alphabet.word("1"))
    f = birkhoff_frequency(win, c)
    assert f == Fraction(3, 6)
    assert isinstance(f, Fraction)


def test_birkhoff_frequency_converges(two_state):
    ps = sample(two_state, 1, 200_000, seed=7)
    c = _cyl(two_state, 1, ["2"])
    f = float(birkhoff_frequency(ps, c))
    assert abs(f - 1 / 6) < 4 * np.sqrt(0.25 / 200_000) * 3  # generous chain slack


def test_model_digest_separates_models(iid12, markov3, two_state):
    digests = {model_digest(m) for m in (iid12, markov3, two_state)}
    assert len(digests) == 3
    assert all(len(d) == 16 for d in digests)
