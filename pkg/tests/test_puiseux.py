import json
import random
from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import leibniz_det, s_add, s_mul
from tropbasis.errors import CutoffExhausted, DivisionByZeroToCutoff
from tropbasis.puiseux import (
    GENERIC_RANGE,
    ZERO_TO_CUTOFF,
    PuiseuxSeries,
    SeriesMatrix,
    deg,
    det,
    div,
    random_generic_coefficient,
    row_minors,
    series_rank,
    sqrt,
)

CUT = Fraction(6)


def as_dict(s: PuiseuxSeries):
    return {Fraction(int(e.numerator), int(e.denominator)): Fraction(int(c.numerator), int(c.denominator)) for e, c in s.terms}


def random_series(rng: random.Random, cutoff=CUT, lead=None, size=4):
    lead = Fraction(rng.randint(-4, 4), rng.choice((1, 2, 3))) if lead is None else lead
    exps = {lead} | {lead + Fraction(rng.randint(1, 12), rng.choice((1, 2))) for _ in range(size - 1)}
    terms = [(e, Fraction(rng.choice((-1, 1)) * rng.randint(1, 9), rng.randint(1, 4))) for e in exps]
    return PuiseuxSeries(terms, cutoff + lead)


def series_st(cutoff=CUT):
    return st.randoms(use_true_random=False).map(lambda r: random_series(r, cutoff))


# -- degree ---------------------------------------------------------------------


def test_deg_examples():
    assert deg(PuiseuxSeries([(Fraction(-1), 1), (0, -1)], 5)) == -1
    assert deg(PuiseuxSeries([(Fraction(1, 2), 3)], 5)) == Fraction(1, 2)
    assert deg(PuiseuxSeries.zero(5)) is ZERO_TO_CUTOFF


def test_terms_beyond_cutoff_are_dropped():
    s = PuiseuxSeries([(0, 1), (5, 2), (7, 3)], 5)
    assert as_dict(s) == {0: 1}


def test_cancelling_terms_vanish():
    s = PuiseuxSeries([(1, 2), (1, -2)], 4)
    assert s.is_zero_to_cutoff() and s.valuation == 4


def test_floats_rejected():
    with pytest.raises(TypeError):
        PuiseuxSeries([(0.5, 1)], 3)


def test_leading_coefficient_of_zero():
    with pytest.raises(DivisionByZeroToCutoff):
        PuiseuxSeries.zero(3).leading_coefficient


# -- ring laws against dict arithmetic ----------------------------------------------


def test_add_mul_match_oracle():
    rng = random.Random(2024)
    for _ in range(1000):
        a, b = random_series(rng), random_series(rng)
        total = a + b
        cut = min(a.cutoff, b.cutoff)
        assert total.cutoff == cut
        want = {e: c for e, c in s_add(as_dict(a), as_dict(b)).items() if e < cut}
        assert as_dict(total) == want
        prod = a * b
        pcut = min(a.cutoff + b.valuation, b.cutoff + a.valuation)
        assert prod.cutoff == pcut
        assert as_dict(prod) == s_mul(as_dict(a), as_dict(b), pcut)


@settings(max_examples=200)
@given(series_st(), series_st(), series_st())
def test_ring_laws(a, b, c):
    assert (a + b) == (b + a)
    assert (a * b) == (b * a)
    assert ((a + b) + c).agrees_with(a + (b + c))
    assert ((a * b) * c).agrees_with(a * (b * c))
    assert (a * (b + c)).agrees_with(a * b + a * c)
    assert (a - a).is_zero_to_cutoff()


# -- valuation laws ----------------------------------------------------------------


def test_valuation_laws():
    rng = random.Random(7)
    for _ in range(1000):
        a, b = random_series(rng), random_series(rng)
        assert deg(a * b) == deg(a) + deg(b)
        if deg(a) != deg(b):
            assert deg(a + b) == min(deg(a), deg(b))
        else:
            s = a + b
            assert s.is_zero_to_cutoff() or deg(s) >= deg(a)


def test_valuation_sum_of_equal_leads_can_rise():
    a = PuiseuxSeries([(0, 1), (1, 1)], 4)
    b = PuiseuxSeries([(0, -1), (2, 1)], 4)
    assert deg(a + b) == 1


# -- division ---------------------------------------------------------------------


def test_geometric_series():
    one = PuiseuxSeries.constant(1, 6)
    q = div(one, PuiseuxSeries([(0, 1), (1, -1)], 6))
    assert as_dict(q) == {Fraction(k): Fraction(1) for k in range(6)}


def test_division_by_zero_series():
    with pytest.raises(DivisionByZeroToCutoff):
        div(PuiseuxSeries.constant(1, 3), PuiseuxSeries.zero(3))


def test_div_mul_round_trip():
    rng = random.Random(11)
    for _ in range(1000):
        a, b = random_series(rng), random_series(rng)
        q = a / b
        assert deg(q) == deg(a) - deg(b)
        assert (q * b).agrees_with(a)
        assert ((a * b) / b).agrees_with(a)


def test_scalar_division_and_shift():
    a = PuiseuxSeries([(0, 2), (1, 4)], 3)
    assert as_dict(a / 2) == {0: 1, 1: 2}
    s = a.shift(Fraction(1, 2))
    assert deg(s) == Fraction(1, 2) and s.cutoff == Fraction(7, 2)


# -- square roots -------------------------------------------------------------------


def test_sqrt_of_square():
    rng = random.Random(5)
    for _ in range(200):
        a = random_series(rng, cutoff=Fraction(8))
        sq = a * a
        r = sqrt(sq, a.leading_coefficient)
        assert r.agrees_with(a)
        assert (r * r).agrees_with(sq)


def test_sqrt_one_minus_t():
    r = sqrt(PuiseuxSeries([(0, 1), (1, -1)], 4), 1)
    assert as_dict(r) == {0: 1, 1: Fraction(-1, 2), 2: Fraction(-1, 8), 3: Fraction(-1, 16)}


def test_sqrt_wrong_branch():
    with pytest.raises(ValueError):
        sqrt(PuiseuxSeries.constant(4, 3), 3)


# -- generic coefficients ---------------------------------------------------------------


def test_generic_coefficient_range_and_determinism():
    draws = [random_generic_coefficient(random.Random(9)) for _ in range(3)]
    assert len(set(draws)) == 1
    rng = random.Random(1)
    for _ in range(500):
        c = random_generic_coefficient(rng)
        assert c.denominator == 1 and GENERIC_RANGE[0] <= c <= GENERIC_RANGE[1]


# -- serialization ------------------------------------------------------------------


@given(series_st())
def test_series_json_round_trip(a):
    again = PuiseuxSeries.from_json(json.loads(json.dumps(a.to_json())))
    assert again == a


def test_matrix_json_round_trip():
    rng = random.Random(3)
    M = SeriesMatrix([[random_series(rng) for _ in range(3)] for _ in range(2)])
    again = SeriesMatrix.from_json(json.loads(json.dumps(M.to_json())))
    assert again == M and again.cutoff == M.cutoff


# -- matrices -----------------------------------------------------------------------


def test_matrix_requires_rectangle():
    with pytest.raises(ValueError):
        SeriesMatrix([[PuiseuxSeries.constant(1, 3)], []])


def test_matrix_common_cutoff_and_tropicalize():
    M = SeriesMatrix([[PuiseuxSeries([(1, 1)], 5), PuiseuxSeries.zero(3)]])
    assert M.cutoff == 3
    assert M.tropicalize() == [[1, ZERO_TO_CUTOFF]]


def test_det_matches_leibniz():
    rng = random.Random(21)
    for n in (1, 2, 3, 4):
        for _ in range(10):
            rows = [[random_series(rng, size=3) for _ in range(n)] for _ in range(n)]
            d = det(rows)
            want = leibniz_det([[as_dict(s) for s in r] for r in rows], d.cutoff)
            assert as_dict(d) == want


def test_row_minors_cover_column_subsets():
    rng = random.Random(4)
    M = SeriesMatrix([[random_series(rng, size=2) for _ in range(4)] for _ in range(2)])
    minors = row_minors(M, (0, 1))
    assert len(minors) == 6
    for cols, m in minors.items():
        assert m == M.minor((0, 1), cols)


def _product(rng, n, k, cutoff=Fraction(30)):
    U = [[random_series(rng, cutoff, lead=Fraction(rng.randint(0, 2)), size=2) for _ in range(k)] for _ in range(n)]
    V = [[random_series(rng, cutoff, lead=Fraction(rng.randint(0, 2)), size=2) for _ in range(n)] for _ in range(k)]
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = U[i][0] * V[0][j]
            for t in range(1, k):
                acc = acc + U[i][t] * V[t][j]
            row.append(acc)
        rows.append(row)
    return SeriesMatrix(rows)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_series_rank_of_products(k):
    rng = random.Random(100 + k)
    for _ in range(150 if k > 1 else 50):
        assert series_rank(_product(rng, 5, k)) == k


def test_series_rank_full():
    rng = random.Random(8)
    for _ in range(50):
        M = SeriesMatrix([[random_series(rng, Fraction(30), size=2) for _ in range(4)] for _ in range(4)])
        assert series_rank(M) == 4


def test_series_rank_rejects_insufficient_precision():
    a = PuiseuxSeries([(0, 1), (1, 1)], 2)
    b = PuiseuxSeries([(0, 1), (1, 1)], 2)
    M = SeriesMatrix([[a, b], [b, a]])
    with pytest.raises(CutoffExhausted):
        series_rank(M, min_cutoff=5)


def test_mpq_coefficients():
    s = PuiseuxSeries([(0, mpq(1, 3))], 2)
    assert s.leading_coefficient == mpq(1, 3)
