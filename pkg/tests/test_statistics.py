import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from photocascade.errors import InvalidArgumentError, ResourceLimitError
from photocascade.statistics import (
    as_fraction,
    click_distribution,
    closed_form_pkk,
    limit_click_distribution,
    monte_carlo_clicks,
    outcome_prob_multinomial,
    two_photon_table,
)

ETAS = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(22, 25), Fraction(1)]


def path_oracle(N, eta_sq, m):
    """Sum over every sequence of per-photon destinations (detector i or its loss mode)."""
    row = [Fraction(0)] * (m + 1)
    cells = [(i, True) for i in range(N)] + [(i, False) for i in range(N)]
    for path in itertools.product(cells, repeat=m):
        p = Fraction(1)
        for _, detected in path:
            p *= (eta_sq if detected else 1 - eta_sq) / N
        row[len({i for i, d in path if d})] += p
    return row


@pytest.mark.parametrize("N", [1, 2, 3, 4])
@pytest.mark.parametrize("eta", ETAS)
def test_multinomial_matches_path_oracle(N, eta):
    dist = click_distribution(N, eta, 3)
    for m in range(4):
        want = path_oracle(N, eta, m)
        assert dist.row(m) == want[: min(m, N) + 1]
        assert all(w == 0 for w in want[min(m, N) + 1:])


def test_multinomial_examples():
    h = Fraction(1, 2)
    assert outcome_prob_multinomial([h, h], 2, (1, 1)) == h
    assert outcome_prob_multinomial([Fraction(1, 3)] * 3, 0, (0, 0, 0)) == 1
    e = Fraction(22, 25)
    assert outcome_prob_multinomial([e, 1 - e], 2, (1, 1)) == 2 * e * (1 - e)
    with pytest.raises(InvalidArgumentError):
        outcome_prob_multinomial([h, Fraction(1, 3)], 1, (1, 0))


def test_click_examples():
    assert click_distribution(4, 1, 2).prob(2, 2) == Fraction(3, 4)
    for N in range(1, 6):
        d = click_distribution(N, Fraction(1, 2), 2)
        assert d.prob(1, 2) == Fraction(1, 4 * N) + Fraction(1, 2)
        assert d.prob(0, 0) == 1 and d.prob(1, 0) == 0


def test_k_beyond_cascade_is_refused():
    d = click_distribution(2, 1, 3)
    with pytest.raises(InvalidArgumentError):
        d.prob(3, 3)
    with pytest.raises(InvalidArgumentError):
        closed_form_pkk(2, 3, 1)


def test_closed_pkk_examples():
    assert closed_form_pkk(4, 2, 1) == Fraction(3, 4)
    assert closed_form_pkk(2, 2, Fraction(1, 2)) == Fraction(1, 8)
    for N in range(1, 8):
        assert closed_form_pkk(N, 1, Fraction(2, 7)) == Fraction(2, 7)


@pytest.mark.parametrize("N", range(1, 7))
def test_closed_pkk_matches_binomial_form(N):
    for k in range(N + 1):
        assert closed_form_pkk(N, k, 1) == Fraction(math.factorial(k) * math.comb(N, k), N**k)


def test_two_photon_table_values():
    e = Fraction(22, 25)
    t = two_photon_table(3, e)
    assert t[(0, 2)] == (1 - e) ** 2
    assert t[(0, 1)] == 1 - e
    assert two_photon_table(1, 1)[(1, 2)] == 1
    assert len(t) == 7


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5, 16])
@pytest.mark.parametrize("eta", ETAS)
def test_closed_route_equals_multinomial(N, eta):
    d = click_distribution(N, eta, 2)
    c = click_distribution(N, eta, 2, "closed")
    assert c.table == d.table
    for k in range(min(N, 2) + 1):
        assert closed_form_pkk(N, k, eta) == d.prob(k, k)
    # the N-independent part of p_N(1|2)
    assert d.prob(1, 2) - 2 * eta * (1 - eta) == eta**2 / N


@pytest.mark.parametrize("N", range(1, 6))
@pytest.mark.parametrize("eta", [Fraction(1, 2), Fraction(22, 25), Fraction(1)])
def test_mdhp_route_agrees(N, eta):
    a = click_distribution(N, eta, 4, "mdhp")
    b = click_distribution(N, eta, 4)
    assert a.table.keys() == b.table.keys()
    for km in a.table:
        assert abs(a.table[km] - b.table[km]) < 1e-10
    assert a.row_sum_deviation() < 1e-10
    assert b.row_sum_deviation() == 0


def test_monte_carlo_targets():
    row = monte_carlo_clicks(4, 1.0, 2, 10**6, seed=7)
    sigma = math.sqrt(0.75 * 0.25 / 10**6)
    assert abs(row.prob(2, 2) - 0.75) <= 4 * sigma
    assert monte_carlo_clicks(3, 0.3, 0, 10, seed=1).prob(0, 0) == 1
    row = monte_carlo_clicks(1, 0.5, 1, 10**6, seed=3)
    assert abs(row.prob(1, 1) - 0.5) <= 4 * math.sqrt(0.25 / 10**6)


def test_monte_carlo_is_reproducible():
    a = monte_carlo_clicks(3, 0.7, 3, 50_000, seed=11)
    b = monte_carlo_clicks(3, 0.7, 3, 50_000, seed=11)
    assert a.table == b.table
    assert sum(a.row(3)) == pytest.approx(1, abs=1e-12)
    full = click_distribution(3, 0.7, 3, "montecarlo", trials=50_000, seed=11)
    assert full.row(3) == a.row(3)


def test_resource_cap():
    with pytest.raises(ResourceLimitError):
        click_distribution(8, 1, 6, composition_cap=1000)


@pytest.mark.parametrize("bad", [dict(N=0, eta_sq=1, m_max=1), dict(N=2, eta_sq=2, m_max=1),
                                 dict(N=2, eta_sq=1, m_max=-1), dict(N=2, eta_sq=1, m_max=1, method="x"),
                                 dict(N=2, eta_sq=1, m_max=3, method="closed")])
def test_invalid_arguments(bad):
    with pytest.raises(InvalidArgumentError):
        click_distribution(**bad)


def test_limit_distribution_is_binomial():
    d = limit_click_distribution(Fraction(1, 3), 4)
    for m in range(5):
        assert d.row(m) == [math.comb(m, k) * Fraction(1, 3) ** k * Fraction(2, 3) ** (m - k)
                            for k in range(m + 1)]


def test_large_cascade_approaches_limit():
    eta = Fraction(22, 25)
    lim = limit_click_distribution(eta, 2)
    gaps = [abs(click_distribution(N, eta, 2).prob(1, 2) - lim.prob(1, 2)) for N in (4, 16, 64)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] == eta**2 / 64


def test_as_fraction():
    assert as_fraction(0.88) == Fraction(22, 25)
    assert as_fraction("1/3") == Fraction(1, 3)
    assert as_fraction("0.5") == Fraction(1, 2)
    with pytest.raises(InvalidArgumentError):
        as_fraction("abc")


def test_serialization():
    d = click_distribution(2, Fraction(1, 2), 2)
    lines = d.to_csv().splitlines()
    assert lines[0] == "N,eta_sq,m,k,probability,method"
    assert "2,0.5,2,1,0.625,multinomial" in lines
    assert "2,1/2,2,1,5/8,multinomial" in d.to_csv(exact=True).splitlines()
    doc = json.loads(d.to_json(exact=True))
    assert doc["method"] == "multinomial" and doc["modes"] == 2
    assert {"k": 1, "m": 2, "probability": "5/8"} in doc["table"]
    mc = json.loads(monte_carlo_clicks(2, 0.5, 1, 100, 0).to_json())
    assert mc["trials"] == 100 and mc["seed"] == 0


@given(st.integers(1, 6), st.integers(0, 4), st.fractions(0, 1, max_denominator=50))
def test_rows_normalize_exactly(N, m_max, eta):
    d = click_distribution(N, eta, m_max)
    for m in range(m_max + 1):
        assert sum(d.row(m)) == 1
        assert all(0 <= p <= 1 for p in d.row(m))


@given(st.integers(1, 6), st.fractions(0, 1, max_denominator=40))
def test_pkk_monotone_in_N(k, eta):
    vals = [closed_form_pkk(N, k, eta) for N in range(k, 65)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
