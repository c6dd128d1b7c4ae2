import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repdiff.certified import CertifiedReal, ceil_sig, enclose_log
from repdiff.matveev import (HypothesisError, LinearFormProblem,
                             certify_bound_direct, certify_nonvanishing,
                             chain_gap_bound, lemma2_solve,
                             linearize_exponential, matveev_coefficient)
from repdiff.quadratic import QuadraticNumber
from repdiff.recurrence import BALANCING

ALPHA = BALANCING.alpha
LOG_ALPHA = enclose_log(ALPHA)
A2 = enclose_log(10) * 2


def test_coefficient_matches_closed_form():
    A = (Fraction(3, 2), Fraction(5), Fraction(12))
    c = matveev_coefficient(LinearFormProblem(3, 2, A))
    mpmath.mp.prec = 200
    oracle = mpmath.mpf("1.4") * 30 ** 6 * mpmath.mpf(3) ** 4.5 * 4 * (1 + mpmath.log(2)) * 90
    assert abs(float(c.mid) / float(oracle) - 1) < 1e-14


@pytest.mark.parametrize("A3, expected", [(Fraction(124, 10), 98 * 10 ** 12), (Fraction(102, 10), 81 * 10 ** 12)])
def test_stage1_checkpoints(A3, expected):
    c = matveev_coefficient(LinearFormProblem(3, 2, (LOG_ALPHA, A2, A3)))
    assert ceil_sig(c.hi) == expected == ceil_sig(c.lo)


@pytest.mark.parametrize("A3, expected", [(10 ** 14, 79 * 10 ** 25), (Fraction(84, 10) * 10 ** 13, 67 * 10 ** 25)])
def test_stage2_checkpoints(A3, expected):
    c = matveev_coefficient(LinearFormProblem(3, 2, (LOG_ALPHA, A2, A3), a_log_power=1))
    assert ceil_sig(c.hi) == expected


def test_folding_reproduces_printed_steps():
    assert chain_gap_bound(98 * 10 ** 12, 4, LOG_ALPHA).constant == 99 * 10 ** 12
    assert chain_gap_bound(79 * 10 ** 25, 4, LOG_ALPHA, log_power=2).constant == 8 * 10 ** 26
    assert chain_gap_bound(67 * 10 ** 25, 3, LOG_ALPHA, log_power=2).constant == 68 * 10 ** 25


@settings(max_examples=50, deadline=None)
@given(st.lists(st.fractions(min_value=Fraction(16, 100), max_value=100), min_size=3, max_size=3),
       st.integers(0, 2), st.fractions(min_value=0, max_value=10))
def test_coefficient_monotone(A, j, bump):
    base = matveev_coefficient(LinearFormProblem(3, 2, tuple(A)), 96)
    A2_ = list(A)
    A2_[j] += bump
    assert matveev_coefficient(LinearFormProblem(3, 2, tuple(A2_)), 96).hi >= base.lo
    longer = matveev_coefficient(LinearFormProblem(4, 2, tuple(A) + (A[0],)), 96)
    assert longer.lo >= base.lo


def test_A_floor_hypothesis():
    with pytest.raises(HypothesisError):
        LinearFormProblem(3, 2, (Fraction(1, 10), 1, 1))


def test_lemma2_paper_instances():
    assert ceil_sig(lemma2_solve(2, CertifiedReal.exact(8 * 10 ** 26) / LOG_ALPHA)) == Fraction(69, 10) * 10 ** 30
    assert ceil_sig(lemma2_solve(2, CertifiedReal.exact(68 * 10 ** 25) / LOG_ALPHA)) == Fraction(58, 10) * 10 ** 30


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 2), st.integers(300, 10 ** 6))
def test_lemma2_against_grid_search(r, H):
    if H <= (4 * r * r) ** r:
        with pytest.raises(HypothesisError):
            lemma2_solve(r, CertifiedReal.exact(H))
        return
    bound = lemma2_solve(r, CertifiedReal.exact(H))
    # every L on a geometric grid above e^(r) with L / (log L)^r < H lies below the bound
    L = 3.0
    while L < 1e13:
        if L > math.e ** r and L / math.log(L) ** r < H:
            assert L < bound
        L *= 1.05


def test_direct_bound_check():
    H = CertifiedReal.exact(8 * 10 ** 26) / LOG_ALPHA
    assert certify_bound_direct(69 * 10 ** 29, H, 2)
    assert not certify_bound_direct(10 ** 28, H, 2)


@settings(max_examples=1000, deadline=None)
@given(st.floats(-0.69, 0.4, allow_nan=False))
def test_linearization_fact(z):
    y = abs(math.expm1(z)) * 1.0000001 + 1e-300
    if y < 0.5:
        assert abs(z) < 2 * y


def test_linearize_hypothesis():
    assert linearize_exponential(CertifiedReal.exact(4) / ALPHA.enclose(100) ** 2) == 2
    with pytest.raises(HypothesisError, match="exponent 2"):
        linearize_exponential(CertifiedReal.exact(4) / ALPHA.enclose(100), numerator=4, base=ALPHA)


def test_nonvanishing():
    lam = QuadraticNumber(0, 4, 9) * 3
    assert certify_nonvanishing(lam, ALPHA).verdict
    assert certify_nonvanishing(QuadraticNumber(2, 0, 3), ALPHA, with_gap=True).verdict
    with pytest.raises(ValueError):
        certify_nonvanishing(QuadraticNumber(1, 1), ALPHA)
