from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repdiff.certified import enclose_log
from repdiff.quadratic import (Add, Div, Leaf, Mul, Pow, QuadraticNumber, Sub,
                               binet_term, compare_to_integer_power,
                               evaluate, factor_tree, height_estimate,
                               height_exact, parse_quadratic)
from repdiff.recurrence import BALANCING, LUCAS_BALANCING, term

mpmath.mp.prec = 300
ALPHA = QuadraticNumber(3, 2, 1, 2)

small = st.integers(-50, 50)
quads = st.builds(QuadraticNumber, small, small, st.integers(1, 20), st.just(2))
nonzero = quads.filter(lambda q: q != 0)


def mpq(x: QuadraticNumber):
    return (mpmath.mpf(x.a) + x.b * mpmath.sqrt(x.D)) / x.c


def test_alpha_structure():
    assert ALPHA.minimal_polynomial() == (1, -6, 1)
    assert ALPHA * ALPHA.conjugate() == 1
    assert ALPHA.norm() == 1 and ALPHA.trace() == 6
    assert str(ALPHA) == "3+2*sqrt2"


def test_canonical_form():
    assert QuadraticNumber(2, 4, 6) == QuadraticNumber(1, 2, 3)
    assert QuadraticNumber(1, 1, -2) == QuadraticNumber(-1, -1, 2)
    assert hash(QuadraticNumber(4, 0, 2)) == hash(QuadraticNumber(2))


def test_parse():
    assert parse_quadratic("4*sqrt2") == QuadraticNumber(0, 4)
    assert parse_quadratic("4*d*sqrt2/9", d=9) == QuadraticNumber(0, 4)
    assert parse_quadratic("2*d/9", d=3) == QuadraticNumber(2, 0, 3)
    for bad in ("4.0*sqrt2", "x*2", "sqrt3"):
        with pytest.raises(ValueError):
            parse_quadratic(bad)


@settings(max_examples=200, deadline=None)
@given(quads, quads)
def test_conjugation_is_automorphism(x, y):
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()
    assert (x + y).conjugate() == x.conjugate() + y.conjugate()


@settings(max_examples=200, deadline=None)
@given(quads, nonzero)
def test_field_operations_match_mpmath(x, y):
    for value, exact in ((x + y, mpq(x) + mpq(y)), (x * y, mpq(x) * mpq(y)), (x / y, mpq(x) / mpq(y))):
        enc = value.enclose(200)
        assert enc.lo - Fraction(1, 10 ** 50) <= Fraction(str(exact)) <= enc.hi + Fraction(1, 10 ** 50)


@settings(max_examples=200, deadline=None)
@given(nonzero)
def test_sign_and_enclosure_agree(x):
    enc = x.enclose(64)
    s = x.sign()
    assert (s > 0 and enc.lo > 0) or (s < 0 and enc.hi < 0)


def test_conjugate_trick_avoids_cancellation():
    small_value = ALPHA.conjugate() ** 40  # about 1e-31
    enc = small_value.enclose(64)
    assert enc.lo > 0 and enc.width / enc.mid < Fraction(1, 2 ** 60)


@pytest.mark.parametrize("n", range(0, 201, 7))
def test_binet_equals_recurrence(n):
    assert binet_term(BALANCING, n) == term(BALANCING, n)
    assert binet_term(LUCAS_BALANCING, n) == term(LUCAS_BALANCING, n)


def test_height_of_alpha():
    h = height_exact(ALPHA).value
    oracle = mpmath.log(3 + 2 * mpmath.sqrt(2)) / 2
    assert abs(mpmath.mpf(h.mid.numerator) / h.mid.denominator - oracle) < mpmath.mpf(10) ** -55
    assert h.overlaps(enclose_log(ALPHA) / 2)


@pytest.mark.parametrize("x", [ALPHA, QuadraticNumber(10)])
@pytest.mark.parametrize("k", [-3, -2, -1, 1, 2, 3])
def test_height_power_identity(x, k):
    assert height_exact(x ** k).value.overlaps(height_exact(x).value * abs(k))


@settings(max_examples=100, deadline=None)
@given(nonzero)
def test_height_inverse_symmetry(x):
    assert height_exact(x).value.overlaps(height_exact(1 / x).value)


def trees(depth=3):
    leaf = st.one_of(
        st.integers(1, 30).map(lambda n: Leaf(Fraction(n))),
        st.builds(QuadraticNumber, st.integers(1, 9), st.integers(1, 9), st.just(1), st.just(2)).map(Leaf))
    return st.recursive(leaf, lambda kids: st.one_of(
        st.builds(Add, kids, kids), st.builds(Sub, kids, kids), st.builds(Mul, kids, kids),
        st.builds(Div, kids, kids), st.builds(Pow, kids, st.integers(1, 3))), max_leaves=6)


@settings(max_examples=100, deadline=None)
@given(trees())
def test_estimate_dominates_exact_height(tree):
    try:
        value = evaluate(tree)
    except ZeroDivisionError:
        return
    if value == 0:
        return
    assert height_estimate(tree, 128).value.hi >= height_exact(value, 128).value.lo


def test_symbolic_exponent_estimate():
    tree = Div(factor_tree(QuadraticNumber(0, 36)), Mul(Leaf(Fraction(9)), Sub(Leaf(Fraction(1)), Pow(Leaf(ALPHA), "g"))))
    est = height_estimate(tree)
    assert est.per_symbol["g"].overlaps(height_exact(ALPHA).value)
    for g in (1, 2, 5, 20):
        lam = evaluate(tree, g=g)
        bound = est.value + est.per_symbol["g"] * g
        assert bound.hi >= height_exact(lam).value.lo


def test_compare_to_integer_power():
    assert compare_to_integer_power(ALPHA, 2, 34) == -1   # 17+12*sqrt2 < 34
    assert compare_to_integer_power(ALPHA, 2, 33) == 1
