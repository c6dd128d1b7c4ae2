"""Acceptance criteria, one test per criterion.

Each test records a ``PASS``/``FAIL`` line; the lines are printed in the
terminal summary (see conftest.py).  Tolerances are the stated ones.
"""

import io
import random
import time
from fractions import Fraction
from math import gcd

import mpmath
import pytest

from repdiff.certified import CertifiedReal, ceil_sig, enclose_log, to_decimal
from repdiff.checkpoints import EPS_TOLERANCE, typo_readings, verify_paper
from repdiff.cli import main
from repdiff.config import load_config
from repdiff.pipeline import emit_certificate, run_proof
from repdiff.quadratic import (Div, Leaf, binet_term, factor_tree,
                               height_estimate, height_exact)
from repdiff.recurrence import (BALANCING, LUCAS_BALANCING,
                                check_growth_envelope)
from repdiff.reduction import (MuLabel, ReductionProblem, cf_expand,
                               log_ratio_recipe, reduce)

RESULTS = []


def record(n: int, ok: bool, detail: str):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def mpf(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def run_cli(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_criterion_1_exhaustive_search():
    details, ok = [], True
    for name in ("balancing", "lucas-balancing"):
        start = time.perf_counter()
        code, text = run_cli("search", "--sequence", name, "--n-max", "50", "--k-min", "2")
        elapsed = time.perf_counter() - start
        good = code == 0 and text.strip().endswith("0 solutions") and elapsed < 5
        ok &= good
        details.append(f"{name}: {text.strip().splitlines()[-1]} in {elapsed:.2f}s")
    record(1, ok, "; ".join(details))


def test_criterion_2_sequence_values():
    b, c = BALANCING.terms(200), LUCAS_BALANCING.terms(200)
    ok = b[:5] == [0, 1, 6, 35, 204] and c[:5] == [1, 3, 17, 99, 577]
    ok &= all(binet_term(BALANCING, n) == b[n] for n in range(201))
    ok &= all(binet_term(LUCAS_BALANCING, n) == c[n] for n in range(201))
    record(2, ok, f"B_0..B_4 = {b[:5]}, C_0..C_4 = {c[:5]}, Binet agrees to n = 200")


def test_criterion_3_growth_envelopes():
    ok = check_growth_envelope(BALANCING, 200) and check_growth_envelope(LUCAS_BALANCING, 200)
    record(3, ok, "both envelopes hold for 1 <= n <= 200")


def _lambda_estimate(config_name: str, d: int):
    cfg = load_config(config_name)
    tree = Div(factor_tree(cfg.binet_divisor * d), Leaf(Fraction(cfg.base - 1)))
    return height_estimate(tree).value


def test_criterion_4_heights():
    mpmath.mp.prec = 400
    h = height_exact(BALANCING.alpha).value
    oracle = mpmath.log(3 + 2 * mpmath.sqrt(2)) / 2
    contains = mpf(h.lo) <= oracle <= mpf(h.hi)
    bal = _lambda_estimate("balancing", 9)
    luc = _lambda_estimate("lucas-balancing", 9)
    ok = contains and bal.certainly_lt(Fraction(62, 10)) and luc.certainly_lt(Fraction(51, 10))
    record(4, ok, f"h(alpha) contains log(alpha)/2: {contains}; "
                  f"estimate 4*9*sqrt2/9 <= {float(bal.hi):.6f} (< 6.2); "
                  f"estimate 2*9/9 <= {float(luc.hi):.6f} (< 5.1)")


def test_criterion_5_matveev(proofs):
    want = {("balancing", 1): Fraction(98, 10) * 10 ** 13, ("lucas-balancing", 1): Fraction(81, 10) * 10 ** 13,
            ("balancing", 2): Fraction(79, 10) * 10 ** 26, ("lucas-balancing", 2): Fraction(67, 10) * 10 ** 26}
    ok, parts = True, []
    for (name, stage), target in want.items():
        cert = proofs[name]
        C = (cert.stage1_matveev if stage == 1 else cert.stage2_matveev)["coefficient"]
        good = ceil_sig(C.lo) == target and ceil_sig(C.hi) == target
        ok &= good
        parts.append(f"{name} stage {stage}: {to_decimal(C.mid, 6)} -> {to_decimal(ceil_sig(C.hi), 2)}")
    record(5, ok, "; ".join(parts))


def test_criterion_6_lemma2(proofs):
    bal, luc = proofs["balancing"].lemma2_bound, proofs["lucas-balancing"].lemma2_bound
    ok = bal == 69 * 10 ** 29 and luc == 58 * 10 ** 29
    record(6, ok, f"balancing n < {to_decimal(bal, 2)}, lucas n < {to_decimal(luc, 2)}")


def test_criterion_7_continued_fraction():
    start = time.perf_counter()
    cf = cf_expand(log_ratio_recipe(10, BALANCING.alpha), 65)
    elapsed = time.perf_counter() - start
    got = (cf.q(62), cf.q(64), cf.q(65))
    ok = got == (82660367338512336905381670798737, 193515224029707700321265026524859,
                 497885304750610764058413408775840) and elapsed < 10
    record(7, ok, f"q62, q64, q65 = {got} in {elapsed:.2f}s")


def test_criterion_8_reductions(proofs):
    bal, luc = proofs["balancing"], proofs["lucas-balancing"]
    targets = [("bal stage 1", bal.reduction1, Fraction("0.243566")),
               ("bal stage 2", bal.reduction2, Fraction("0.1734988")),
               ("luc stage 1", luc.reduction1, Fraction("0.0781826")),
               ("luc stage 2", luc.reduction2, Fraction("0.0041201"))]
    ok, parts = True, []
    for label, red, expected in targets:
        good = abs(red.epsilon_min.mid - expected) <= EPS_TOLERANCE
        ok &= good
        parts.append(f"{label} eps {float(red.epsilon_min.mid):.7f} at q_{red.q_index} "
                     f"vs {float(expected)} {'ok' if good else 'differs'}")
    bounds = (bal.reduction1.w_bound, bal.reduction2.w_bound, luc.reduction1.w_bound, luc.reduction2.w_bound)
    ok &= bounds == (43, 44, 43, 46)
    parts.append(f"bounds (bal n-m, bal n, luc n-m, luc n) = {bounds} vs (43, 44, 43, 46)")
    parts.append(f"q60/q62 typo readings for 0.0781826: {typo_readings(luc)}")
    record(8, ok, "; ".join(parts))


def test_criterion_9_end_to_end(proofs):
    start = time.perf_counter()
    ok, parts = True, []
    for name in ("balancing", "lucas-balancing"):
        first = emit_certificate(run_proof(load_config(name)), "structured")
        second = emit_certificate(run_proof(load_config(name)), "structured")
        verdict = proofs[name].verdict
        ok &= verdict == "proven" and first == second
        parts.append(f"{name}: {verdict}, byte-identical {first == second}")
    results = verify_paper(proofs)
    bad = [r.id for r in results if r.status != "PASS"]
    ok &= not bad
    elapsed = time.perf_counter() - start
    ok &= elapsed < 120
    parts.append(f"verify-paper {len(results) - len(bad)}/{len(results)} PASS"
                 + (f", mismatched: {', '.join(bad)}" if bad else ""))
    parts.append(f"{elapsed:.1f}s")
    record(9, ok, "; ".join(parts))


def _interval_containment(cases: int) -> bool:
    rng = random.Random(20261018)
    mpmath.mp.prec = 300

    def rat():
        return Fraction(rng.randint(-10 ** 6, 10 ** 6), rng.randint(1, 10 ** 6))

    for _ in range(cases):
        x, y = rat(), rat()
        ex, ey = CertifiedReal(x - Fraction(1, 10 ** 9), x + Fraction(1, 10 ** 9)), CertifiedReal.exact(y)
        checks = [(ex + ey, x + y), (ex - ey, x - y), (ex * ey, x * y)]
        if y:
            checks.append((ex / ey, x / y))
        for enc, value in checks:
            if not enc.contains(value):
                return False
        if x > 0:
            lg = enclose_log(x, 128)
            if not mpf(lg.lo) <= mpmath.log(mpf(x)) <= mpf(lg.hi):
                return False
    return True


def _height_power_identity() -> bool:
    for x in (BALANCING.alpha, LUCAS_BALANCING.alpha, BALANCING.binet_divisor):
        h = height_exact(x).value
        for k in (-3, -2, -1, 2, 3, 5):
            if not height_exact(x ** k).value.overlaps(h * abs(k)):
                return False
    return True


def _convergent_properties() -> bool:
    mpmath.mp.prec = 800
    cf = cf_expand(log_ratio_recipe(10, BALANCING.alpha), 70)
    tau = mpmath.log(10) / mpmath.log(3 + 2 * mpmath.sqrt(2))
    for i in range(70):
        p, q = cf.convergents[i]
        err = q * tau - p
        if gcd(p, q) != 1 or (err > 0) != (i % 2 == 0) or abs(err) >= mpmath.mpf(1) / cf.q(i + 1):
            return False
    return True


def _lemma1_oracle() -> bool:
    mpmath.mp.prec = 200
    M, A, B = 1000, 5, 2
    tau = log_ratio_recipe(3, 2)
    out = reduce(ReductionProblem(tau, [MuLabel("mu", log_ratio_recipe(5, 2))], A, B, M))
    t, mu = mpmath.log(3) / mpmath.log(2), mpmath.log(5) / mpmath.log(2)
    for u in range(1, M + 1):
        x = u * t + mu
        for v in (mpmath.floor(x), mpmath.ceil(x)):
            val = abs(x - v)
            w = mpmath.floor(mpmath.log(A / val) / mpmath.log(B))
            if w > out.w_bound:
                return False
    return True


def test_criterion_10_property_suites():
    checks = {"interval containment (10^4)": _interval_containment(10 ** 4),
              "height power identity": _height_power_identity(),
              "convergent alternation/gcd": _convergent_properties(),
              "Lemma-1 oracle (u <= 10^3)": _lemma1_oracle()}
    record(10, all(checks.values()), ", ".join(f"{k}: {'ok' if v else 'failed'}" for k, v in checks.items()))
