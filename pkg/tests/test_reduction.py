import time
from fractions import Fraction
from math import gcd

import mpmath
import pytest

from repdiff.certified import CertifiedReal, enclose_log
from repdiff.reduction import (ContinuedFractionExpansion, MuLabel,
                               ReductionFailed, ReductionProblem,
                               build_lambda_inequality, cf_expand,
                               cylinder_contains, detect_relation,
                               find_denominator_exceeding,
                               log_ratio_recipe, reduce)
from repdiff.recurrence import BALANCING, LUCAS_BALANCING

TAU = log_ratio_recipe(10, BALANCING.alpha)
Q62 = 82660367338512336905381670798737
Q64 = 193515224029707700321265026524859
Q65 = 497885304750610764058413408775840


@pytest.fixture(scope="module")
def cf():
    return cf_expand(TAU, 70, "log 10 / log alpha")


def test_published_denominators(cf):
    assert (cf.q(62), cf.q(64), cf.q(65)) == (Q62, Q64, Q65)


def test_expansion_is_fast():
    start = time.perf_counter()
    cf_expand(log_ratio_recipe(10, BALANCING.alpha), 65)
    assert time.perf_counter() - start < 10


def test_rational_input_terminates():
    cf = ContinuedFractionExpansion(lambda bits: CertifiedReal.exact(Fraction(7, 3)))
    assert not cf.ensure(5)
    assert cf.partial_quotients == [2, 3]
    assert cf.convergents == [(2, 1), (7, 3)]


def test_convergent_properties(cf):
    mpmath.mp.prec = 800
    tau = mpmath.log(10) / mpmath.log(3 + 2 * mpmath.sqrt(2))
    for i in range(70):
        p, q = cf.convergents[i]
        assert gcd(p, q) == 1
        err = q * tau - p
        assert abs(err) < mpmath.mpf(1) / cf.q(i + 1)
        assert (err > 0) == (i % 2 == 0)   # even convergents lie below tau
    assert cylinder_contains(cf.partial_quotients, TAU(cf.bits))
    bad = list(cf.partial_quotients)
    bad[10] += 1
    assert not cylinder_contains(bad, TAU(cf.bits))


def test_first_denominator_exceeding(cf):
    assert find_denominator_exceeding(cf, 6 * 69 * 10 ** 29)[0] == 62
    assert find_denominator_exceeding(cf, 0) == (0, 1)


def test_lambda_inequality_shapes():
    p = build_lambda_inequality("gap", BALANCING, rhs=4, M=69 * 10 ** 29)
    assert (p.A, p.w_name, len(p.mu_family)) == (5, "n-m", 9)
    p = build_lambda_inequality("absolute", LUCAS_BALANCING, rhs=3, M=58 * 10 ** 29, gaps=range(1, 44))
    assert (p.A, p.w_name, len(p.mu_family)) == (4, "n", 9 * 43)
    lucas = build_lambda_inequality("gap", LUCAS_BALANCING, rhs=3, M=58 * 10 ** 29)
    mpmath.mp.prec = 200
    mu2 = mpmath.log(mpmath.mpf(4) / 9) / mpmath.log(3 + 2 * mpmath.sqrt(2))
    enc = lucas.mu_family[1].recipe(192)
    assert enc.lo <= Fraction(str(mu2)) + Fraction(1, 10 ** 50) and Fraction(str(mu2)) - Fraction(1, 10 ** 50) <= enc.hi


def test_relation_detection():
    alpha = BALANCING.alpha
    assert detect_relation(alpha ** 3, alpha, 10) == (0, 3)
    assert detect_relation(alpha ** -2 * 100, alpha, 10) == (2, -2)
    assert detect_relation(BALANCING.binet_divisor, alpha, 10) is None


def _brute_max_w(tau, mu, A, B, M, a_shift=0):
    """Largest w over all 1 <= u <= M with 0 < |u tau - v + mu| < A B^-w (None if no solution)."""
    best = None
    for u in range(1, M + 1):
        x = u * tau + mu
        for v in (mpmath.floor(x), mpmath.ceil(x)):
            val = abs(x - v)
            if val == 0:
                continue
            w_max = mpmath.floor(mpmath.log(A / val) / mpmath.log(B) - mpmath.mpf(10) ** -30)
            if w_max >= 0 and (best is None or w_max > best):
                best = int(w_max)
    return best


@pytest.mark.parametrize("tau_args, mus, A, B", [
    ((3, 2), [(5, 2), (7, 2)], 5, 2),
    ((10, 7), [(2, 7), (9, 4)], 3, 7),
    ((10, BALANCING.alpha), [(Fraction(4, 9), BALANCING.alpha)], 4, BALANCING.alpha),
])
def test_small_scale_exclusion_oracle(tau_args, mus, A, B):
    M = 1000
    tau = log_ratio_recipe(*tau_args)
    labels = [MuLabel(f"mu{i}", log_ratio_recipe(*m)) for i, m in enumerate(mus)]
    out = reduce(ReductionProblem(tau, labels, A, B, M))
    mpmath.mp.prec = 200

    def mp_log(x):
        if isinstance(x, Fraction):
            return mpmath.log(mpmath.mpf(x.numerator) / x.denominator)
        if hasattr(x, "D"):
            return mpmath.log((x.a + x.b * mpmath.sqrt(x.D)) / x.c)
        return mpmath.log(x)

    t = mp_log(tau_args[0]) / mp_log(tau_args[1])
    b = mp_log(B) if not isinstance(B, int) else mpmath.log(B)
    for lab, (num, den) in zip(out.per_label, mus):
        mu = mp_log(num) / mp_log(den)
        worst = _brute_max_w(t, mu, A, mpmath.e ** b, M)
        assert worst is None or worst <= lab.w_bound


def test_best_approximation_label_oracle():
    M = 1000
    tau = log_ratio_recipe(3, 2)
    # mu = 2 tau + 1 exactly
    mu = lambda bits: tau(bits) * 2 + 1
    out = reduce(ReductionProblem(tau, [MuLabel("rel", mu, (2, 1))], 5, 2, M))
    lab = out.per_label[0]
    assert lab.method == "best-approximation"
    mpmath.mp.prec = 200
    t = mpmath.log(3) / mpmath.log(2)
    worst = _brute_max_w(t, 2 * t + 1, 5, 2, M)
    assert worst <= lab.w_bound


def test_reduction_deterministic_and_monotone():
    labels = [MuLabel("a", log_ratio_recipe(5, 2)), MuLabel("b", log_ratio_recipe(7, 2))]
    tau = log_ratio_recipe(3, 2)
    first = reduce(ReductionProblem(tau, labels, 5, 2, 10 ** 6))
    again = reduce(ReductionProblem(tau, labels, 5, 2, 10 ** 6))
    assert first == again
    indices = [reduce(ReductionProblem(tau, labels, 5, 2, M)).q_index for M in (10, 10 ** 3, 10 ** 6, 10 ** 9)]
    assert indices == sorted(indices)


def test_retry_budget_exhaustion_reports_labels():
    tau = log_ratio_recipe(3, 2)
    # with no retries, no single convergent certifies eps > 0 for this many labels
    labels = [MuLabel(f"m{k}", log_ratio_recipe(k, 2)) for k in range(3, 40, 2)]
    with pytest.raises(ReductionFailed) as info:
        reduce(ReductionProblem(tau, labels, 5, 2, 10 ** 6), strategy="shared", retries=0)
    assert info.value.diagnostics


def test_shared_strategy_uses_one_convergent():
    p = build_lambda_inequality("gap", BALANCING, rhs=4, M=69 * 10 ** 29)
    out = reduce(p, strategy="shared")
    assert len({lab.q_index for lab in out.per_label}) == 1
    assert out.w_bound == 43
