"""Shared fixture builders for the test suite.

The same handful of codes and models recurs everywhere, frozen here so every
test file agrees on the numbers: the unary code on support {1, 2} with the
uniform source (mean codeword length 2.5, boundary density 0.4), the
two-state chain with stationary law (5/6, 1/6), and the quarter coin.
"""

import pytest

import normtransport as nt
from normtransport.core import Alphabet


@pytest.fixture
def unary12():
    return nt.make_unary([1, 2])


@pytest.fixture
def iid12(unary12):
    return nt.IIDModel(unary12.source, [0.5, 0.5])


@pytest.fixture
def unary3():
    return nt.make_unary([0, 1, 2])


@pytest.fixture
def markov3(unary3):
    return nt.MarkovModel(
        unary3.source,
        [[0.2, 0.5, 0.3], [0.4, 0.1, 0.5], [0.25, 0.25, 0.5]],
    )


@pytest.fixture
def embedded():
    # codewords a -> 10, b -> 010 (separator 1, fixed suffix 0)
    return nt.make_comma_embedded({"a": "", "b": "0"}, "1", {"a": "0", "b": "0"})


@pytest.fixture
def two_state():
    ab = Alphabet("chain", ("1", "2"))
    return nt.MarkovModel(ab, [[0.9, 0.1], [0.5, 0.5]])


@pytest.fixture
def coin():
    ab = Alphabet("coin", ("h", "t"))
    return nt.IIDModel(ab, [0.25, 0.75])


@pytest.fixture
def mixture12(unary12):
    comps = [
        nt.IIDModel(unary12.source, [1.0, 0.0]),
        nt.IIDModel(unary12.source, [0.0, 1.0]),
    ]
    return nt.MixtureModel([0.3, 0.7], comps)
