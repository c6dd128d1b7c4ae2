import time

import pytest
from hypothesis import given
from hypothesis import strategies as st

from repdiff.quadratic import binet_term
from repdiff.recurrence import (BALANCING, LUCAS_BALANCING, Repdigit,
                                SequenceSpec, check_growth_envelope,
                                classify_repdigit, exhaustive_search,
                                repdigit_value, sequence_from_name, term)


def test_initial_terms():
    assert BALANCING.terms(4) == [0, 1, 6, 35, 204]
    assert LUCAS_BALANCING.terms(4) == [1, 3, 17, 99, 577]
    assert term(BALANCING, 10) == BALANCING.terms(10)[10]


def test_binet_data():
    assert str(BALANCING.binet_divisor) == "4*sqrt2"
    assert str(LUCAS_BALANCING.binet_divisor) == "2"
    assert BALANCING.alpha.minimal_polynomial() == (1, -6, 1)


def test_binet_oracle_up_to_200():
    for spec in (BALANCING, LUCAS_BALANCING):
        u = spec.terms(200)
        assert all(binet_term(spec, n) == u[n] for n in range(201))


def test_balancing_cassini():
    b = BALANCING.terms(101)
    assert all(b[n + 1] * b[n - 1] == b[n] ** 2 - 1 for n in range(1, 101))


def test_growth_envelopes():
    assert check_growth_envelope(BALANCING, 200)
    assert check_growth_envelope(LUCAS_BALANCING, 200)


@given(st.integers(1, 9), st.integers(1, 60))
def test_repdigit_round_trip(d, k):
    assert classify_repdigit(repdigit_value(d, k)) == (d, k)
    assert Repdigit(d, k).value == repdigit_value(d, k)


@given(st.integers(1, 10 ** 12))
def test_classify_is_inverse(N):
    hit = classify_repdigit(N)
    if hit:
        assert repdigit_value(*hit) == N
    else:
        assert len(set(str(N))) > 1


def test_repdigit_rejects_bad_digits():
    for d, k in ((0, 2), (10, 2), (3, 0)):
        with pytest.raises(ValueError):
            Repdigit(d, k)
    assert classify_repdigit(0) is None and classify_repdigit(10) is None


@pytest.mark.parametrize("spec", [BALANCING, LUCAS_BALANCING])
def test_no_solution_up_to_50(spec):
    start = time.perf_counter()
    assert exhaustive_search(spec, 50, 2) == []
    assert time.perf_counter() - start < 5


@pytest.mark.parametrize("spec", [BALANCING, LUCAS_BALANCING])
def test_search_independent_of_order(spec):
    for k_min in (1, 2):
        assert exhaustive_search(spec, 60, k_min) == exhaustive_search(spec, 60, k_min, reverse=True)


def test_trivial_repdigits_found_with_k1():
    sols = exhaustive_search(BALANCING, 5, 1)
    assert any((s.n, s.m, s.d, s.k) == (2, 1, 5, 1) for s in sols)


def test_sequence_validation():
    with pytest.raises(ValueError):
        SequenceSpec(2, 1, 0, 1)      # repeated root
    with pytest.raises(ValueError):
        sequence_from_name("fibonacci")
    assert sequence_from_name("lucas_balancing") is LUCAS_BALANCING
