import random
from fractions import Fraction

import pytest

from taukappa.core import EMPTY, MultiIndex
from taukappa.series import (EMPTY_MONO, TruncatedSeries, format_monomial,
                             genus_of_monomial, mono_divisors, mono_mul)
from taukappa.virasoro import (V0_CONSTANT, VirasoroOperator, apply_virasoro,
                               build_partition_function, commutator_check,
                               gamma_constant, kdv_residual,
                               mixed_generating_series, p_polynomial,
                               substitution_check, virasoro_residual_report)

K1 = MultiIndex({1: 1})


def _mono(tpairs=(), spairs=()):
    return (tuple(sorted(tpairs)), tuple(sorted(spairs)))


def test_gamma_values():
    assert gamma_constant(EMPTY) == 1
    assert gamma_constant(K1) == Fraction(-1, 3)
    assert gamma_constant(MultiIndex({1: 2})) == Fraction(1, 30)


def test_monomial_helpers():
    m = _mono([(0, 2), (3, 1)], [(1, 1)])
    assert genus_of_monomial(m) is None            # 4/3 is not a genus
    assert genus_of_monomial(_mono([(0, 2), (3, 1)])) == 1
    assert len(list(mono_divisors(m))) == 3 * 2 * 2
    assert format_monomial(m) == "t0^2*t3*s1"
    assert mono_mul(m, _mono([(0, 1)])) == _mono([(0, 3), (3, 1)], [(1, 1)])


def test_no_stored_monomial_outside_admission():
    s = TruncatedSeries({_mono([(0, 1)]): Fraction(1),
                         _mono([(1, 1)]): Fraction(7)},
                        admitted={_mono([(0, 1)])})
    assert _mono([(1, 1)]) not in s.terms       # corrupted value dropped
    assert s.coefficient(_mono([(0, 1)])) == 1
    assert not s.is_admitted(_mono([(1, 1)]))


def test_series_arithmetic_and_admission():
    a = TruncatedSeries({_mono([(0, 1)]): Fraction(1)})
    b = TruncatedSeries({_mono([(0, 1)]): Fraction(-1),
                         _mono([(1, 1)]): Fraction(2)})
    s = a + b
    assert s.coefficient(_mono([(0, 1)])) == 0
    assert s.coefficient(_mono([(1, 1)])) == 2
    assert s.admitted is None
    # truncated + exact keeps the truncated admission
    t = TruncatedSeries({_mono([(0, 1)]): Fraction(1)},
                        admitted={_mono([(0, 1)])})
    assert (t + a).admitted == frozenset({_mono([(0, 1)])})


def test_operator_term_list_matches_displayed_groups():
    op = VirasoroOperator(0)
    terms = op.term_list(s_weight_bound=1, j_bound=2)
    kinds = {}
    for t in terms:
        kinds.setdefault(t[0], []).append(t)
    # L = 0 branch: -1/2 * 3!! * gamma_0 d/dt_1
    lead = [t for t in kinds["s_shift"] if t[2] == EMPTY][0]
    assert lead[1] == Fraction(-3, 2) and lead[3] == 1
    # L = kappa_1 branch carries gamma_{(1)} = -1/3 and target t_2
    k1term = [t for t in kinds["s_shift"] if t[2] == K1][0]
    assert k1term[1] == Fraction(-1, 2) * 15 * Fraction(-1, 3)
    assert k1term[3] == 2
    # scaling branch (2j+1) t_j d/dt_j
    assert [(t[2], t[1]) for t in kinds["scale"]] == [
        (0, Fraction(1, 2)), (1, Fraction(3, 2)), (2, Fraction(5, 2))]
    assert kinds["const"][0][1] == V0_CONSTANT
    vm1 = VirasoroOperator(-1).term_list(0, 1)
    assert ("const_t0sq", Fraction(1, 4)) in vm1
    second = [t for t in VirasoroOperator(2).term_list(0, 0)
              if t[0] == "second"]
    assert {(t[2], t[3]) for t in second} == {(0, 1), (1, 0)}


def test_v1_kills_constants():
    one = TruncatedSeries({EMPTY_MONO: Fraction(1)})
    assert not apply_virasoro(1, one).terms


def test_generating_series_known_coefficients():
    G = mixed_generating_series(0, 3, 0)
    assert G.coefficient(_mono([(0, 3)])) == Fraction(1, 6)   # <tau_0^3>/3!
    G = mixed_generating_series(1, 1, 0)
    assert G.coefficient(_mono([(1, 1)])) == Fraction(1, 24)
    G = mixed_generating_series(2, 0, 3)
    assert G.coefficient(_mono([], [(1, 3)])) == Fraction(43, 2880 * 6)
    # the pure-s1 coefficient vanishes: no stable unmarked surface carries it
    G = mixed_generating_series(1, 0, 1)
    assert G.coefficient(_mono([], [(1, 1)])) == 0
    assert G.is_admitted(_mono([], [(1, 1)]))


def test_virasoro_annihilates_partition_function():
    Z = build_partition_function(1, 4, 0)
    for k in (-1, 0, 1):
        nonzero, checked = virasoro_residual_report(k, 1, 4, 0, partition=Z)
        assert nonzero == [] and checked > 0, k
    Z = build_partition_function(2, 3, 1)
    for k in (-1, 0, 1, 2):
        nonzero, checked = virasoro_residual_report(k, 2, 3, 1, partition=Z)
        assert nonzero == [] and checked > 0, k


def test_empty_monomial_is_admitted_and_zero():
    """The t_1 and constant contributions cancel only with the 1/16 term."""
    Z = build_partition_function(1, 2, 0)
    image = apply_virasoro(0, Z)
    assert image.is_admitted(EMPTY_MONO)
    assert image.coefficient(EMPTY_MONO) == 0


def _random_probe(rng):
    terms = {}
    for _ in range(6):
        tpart = tuple(sorted({i: rng.randint(1, 2) for i in
                              rng.sample(range(5), rng.randint(0, 2))}.items()))
        spart = tuple(sorted({j: rng.randint(1, 2) for j in
                              rng.sample([1, 2], rng.randint(0, 1))}.items()))
        terms[(tpart, spart)] = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    return TruncatedSeries(terms)


def test_commutators_on_probes():
    rng = random.Random(7)
    assert not commutator_check(0, 0, _random_probe(rng)).terms
    assert not commutator_check(1, -1, _random_probe(rng)).terms
    probe = TruncatedSeries({_mono([(0, 1), (1, 1)]): Fraction(1)})
    assert not commutator_check(2, 1, probe).terms
    for n in range(-1, 4):
        for m in range(-1, n):
            assert not commutator_check(n, m, _random_probe(rng)).terms, (n, m)


def test_apply_virasoro_is_linear():
    rng = random.Random(23)
    for k in (-1, 0, 2):
        x, y = _random_probe(rng), _random_probe(rng)
        a = Fraction(rng.randint(-5, 5), rng.randint(1, 6))
        b = Fraction(rng.randint(-5, 5), rng.randint(1, 6))
        lhs = apply_virasoro(k, x.scaled(a) + y.scaled(b))
        rhs = apply_virasoro(k, x).scaled(a) + apply_virasoro(k, y).scaled(b)
        assert not (lhs - rhs).terms


def test_p_polynomials():
    assert p_polynomial(2) == {K1: Fraction(1)}
    p3 = p_polynomial(3)
    assert p3[MultiIndex({2: 1})] == 1
    assert p3[MultiIndex({1: 2})] == Fraction(-1, 2)
    assert p_polynomial(4)[MultiIndex({1: 3})] == Fraction(1, 6)
    with pytest.raises(ValueError):
        p_polynomial(1)


def test_substitution_spot_coefficients():
    res = substitution_check(2, 1, 3)
    assert res.nonzero_admitted() == []
    direct = mixed_generating_series(2, 1, 3)
    # s1 t0 block: <kappa_1 tau_0>_1 = 1/24 on both sides
    assert direct.coefficient(_mono([(0, 1)], [(1, 1)])) == Fraction(1, 24)
    assert res.is_admitted(_mono([(0, 1)], [(1, 1)]))
    # pure kappa block: <kappa_1^3>_2 / 3!
    assert direct.coefficient(_mono([], [(1, 3)])) == Fraction(43, 2880 * 6)
    assert res.is_admitted(_mono([], [(1, 3)]))


def test_substitution_residual_small():
    res = substitution_check(2, 2, 2)
    assert res.nonzero_admitted() == []
    assert len(res.admitted) > 50
    assert res.is_admitted(_mono([(0, 1), (1, 1)]))
    # t0^3 needs three insertions: inside the nmax = 3 region instead
    res = substitution_check(2, 3, 1)
    assert res.nonzero_admitted() == []
    assert res.is_admitted(_mono([(0, 3)]))


def test_kdv_residual():
    res = kdv_residual(2, 6)
    assert res.nonzero_admitted() == []
    assert len(res.admitted) > 5
    empty = TruncatedSeries({})
    quad = empty.mul(empty.derivative(0))
    assert not (empty.derivative(1) - quad).terms


def test_series_json_dump():
    s = TruncatedSeries({_mono([(0, 2)], [(1, 1)]): Fraction(1, 3),
                         _mono(): Fraction(2)})
    import json
    payload = json.loads(s.to_json())
    assert payload == {"t0^2*s1": "1/3", "1": "2/1"}
