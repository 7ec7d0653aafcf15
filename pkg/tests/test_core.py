import random
from fractions import Fraction
from math import gcd

import pytest

from taukappa.core import (EMPTY, MultiIndex, double_factorial,
                           enumerate_sub_multiindices, enumerate_triple_splits,
                           invert_coefficient_family, multiindex_binomial,
                           multiindex_multinomial, multiindex_norms,
                           multiindices_of_weight, multiindices_up_to_weight)


def test_double_factorial_conventions():
    assert double_factorial(-1) == 1
    assert double_factorial(0) == 1
    assert double_factorial(7) == 105
    assert double_factorial(8) == 384
    with pytest.raises(ValueError):
        double_factorial(-2)


def test_multiindex_norms():
    assert multiindex_norms(EMPTY) == (0, 0)
    assert multiindex_norms(MultiIndex({1: 2, 2: 1})) == (4, 3)
    assert multiindex_norms(MultiIndex({3: 1})) == (3, 1)


def test_multiindex_canonical_form():
    assert MultiIndex({1: 0, 2: 3}) == MultiIndex({2: 3})
    assert MultiIndex({1: 1}) != MultiIndex({2: 1})
    assert hash(MultiIndex({1: 2})) == hash(MultiIndex([(1, 1), (1, 1)]))
    with pytest.raises(ValueError):
        MultiIndex({0: 1})
    with pytest.raises(ValueError):
        MultiIndex({1: -1})


def test_multiindex_parse_roundtrip():
    b = MultiIndex.parse("1:3,2:1")
    assert b == MultiIndex({1: 3, 2: 1})
    assert MultiIndex.parse(str(b)) == b
    assert MultiIndex.parse("") == EMPTY
    assert MultiIndex.parse("-") == EMPTY


def test_multiindex_binomial():
    assert multiindex_binomial(MultiIndex({1: 2}), MultiIndex({1: 1})) == 2
    assert multiindex_binomial(MultiIndex({1: 5, 3: 2}), EMPTY) == 1
    assert multiindex_binomial(MultiIndex({1: 1}), MultiIndex({2: 1})) == 0


def test_enumerate_sub_multiindices():
    assert list(enumerate_sub_multiindices(EMPTY)) == [(EMPTY, EMPTY)]
    two = list(enumerate_sub_multiindices(MultiIndex({1: 1})))
    assert two == [(EMPTY, MultiIndex({1: 1})), (MultiIndex({1: 1}), EMPTY)]
    four = list(enumerate_sub_multiindices(MultiIndex({1: 1, 2: 1})))
    assert len(four) == 4
    for left, right in four:
        assert left + right == MultiIndex({1: 1, 2: 1})
    # deterministic order
    again = list(enumerate_sub_multiindices(MultiIndex({1: 1, 2: 1})))
    assert four == again


def test_triple_splits_count_and_multinomial():
    b = MultiIndex({1: 2})
    triples = list(enumerate_triple_splits(b))
    assert len(triples) == 6   # C(2+2, 2)
    total = sum(multiindex_multinomial(b, t) for t in triples)
    assert total == 3 ** 2     # trinomial expansion of (1+1+1)^2


def test_multiindices_of_weight():
    assert multiindices_of_weight(0) == [EMPTY]
    w3 = multiindices_of_weight(3)
    assert len(w3) == 3        # partitions of 3
    assert all(m.weight == 3 for m in w3)
    assert len(multiindices_up_to_weight(4)) == 1 + 1 + 2 + 3 + 5


def _beta_theorem4(L: MultiIndex) -> Fraction:
    return Fraction((-1) ** L.size,
                    L.factorial() * double_factorial(2 * L.weight + 1))


def test_invert_identity_family():
    indicator = lambda L: Fraction(1) if L == EMPTY else Fraction(0)
    alpha = invert_coefficient_family(indicator)
    assert alpha(EMPTY) == 1
    assert alpha(MultiIndex({1: 1})) == 0
    assert alpha(MultiIndex({2: 3})) == 0


def test_invert_double_factorial_family():
    alpha = invert_coefficient_family(_beta_theorem4)
    assert alpha(MultiIndex({1: 1})) == Fraction(1, 3)
    assert alpha(MultiIndex({2: 1})) == Fraction(1, 15)


def test_invert_rejects_zero_leading_coefficient():
    with pytest.raises(ValueError):
        invert_coefficient_family(lambda L: Fraction(0))


def test_invert_round_trip():
    rng = random.Random(12)

    def beta(L):
        if L == EMPTY:
            return Fraction(3, 2)
        rng2 = random.Random(hash(L.entries) & 0xFFFF)
        return Fraction(rng2.randint(-9, 9), rng2.randint(1, 7))

    alpha = invert_coefficient_family(beta)
    beta_back = invert_coefficient_family(alpha)
    for w in range(6):
        for m in multiindices_of_weight(w):
            assert beta_back(m) == beta(m)
    # convolution identity on random indices
    for m in multiindices_up_to_weight(5):
        conv = sum((alpha(l) * beta(r)
                    for l, r in enumerate_sub_multiindices(m)),
                   Fraction(0))
        assert conv == (1 if m == EMPTY else 0)


def test_fractions_stay_reduced_under_fuzz():
    rng = random.Random(99)
    vals = [Fraction(rng.randint(-60, 60), rng.randint(1, 60))
            for _ in range(40)]
    acc = Fraction(1, 3)
    for v in vals:
        acc = acc * v + Fraction(1, 7) if v else acc - v
        assert acc.denominator >= 1
        assert gcd(abs(acc.numerator), acc.denominator) == 1
