"""End-to-end proof chain for ``U_n - U_m = repdigit`` and its certificates."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Optional

from .certified import (DEFAULT_POLICY, CertifiedReal, PrecisionPolicy,
                        ceil_sig, enclose_log, enclosure_from_json,
                        enclosure_to_json, format_enclosure, log_of, next_sig,
                        to_decimal)
from .config import ProblemConfig
from .matveev import (BoundExpression, LinearFormProblem, certify_bound_direct,
                      certify_nonvanishing, chain_gap_bound, lemma2_solve,
                      linearize_exponential, matveev_coefficient)
from .quadratic import (Div, Leaf, Mul, Pow, QuadraticNumber, Sub,
                        factor_tree, height_estimate, height_exact)
from .recurrence import SearchSolution, exhaustive_search
from .reduction import (ContinuedFractionExpansion, ReductionFailed,
                        ReductionOutcome, build_lambda_inequality,
                        cylinder_contains, reduce)

log = logging.getLogger(__name__)

CERT_VERSION = "cert-v1"
D_L = 2
SIG = 130


@dataclass
class ProofCertificate:
    config: ProblemConfig
    policy: PrecisionPolicy
    small_search: list = field(default_factory=list)
    nonvanishing: list = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    heights: dict = field(default_factory=dict)
    stage1_matveev: Optional[dict] = None
    stage2_matveev: Optional[dict] = None
    lemma2: Optional[dict] = None
    lemma2_bound: Optional[int] = None
    linearization: Optional[dict] = None
    expansion: Optional[ContinuedFractionExpansion] = None
    reduction1: Optional[ReductionOutcome] = None
    reduction2: Optional[ReductionOutcome] = None
    reduction_params: dict = field(default_factory=dict)
    closure: Optional[dict] = None
    verdict: str = "not-proven"
    reason: str = ""
    failed_stage: Optional[str] = None


def _max_enclosure(items):
    out = None
    for x in items:
        out = x if out is None else out.max_with(x)
    return out


def _stage1_heights(config: ProblemConfig, bits: int, log=enclose_log):
    """Largest triangle-inequality height of lambda over the digit range, and of ``|log lambda|``."""
    estimates = []
    abs_logs = []
    for d in config.digits:
        lam = config.lambda3_value(d)
        tree = Div(factor_tree(config.binet_divisor * d), Leaf(Fraction(config.base - 1)))
        estimates.append(height_estimate(tree, bits, log).value)
        abs_logs.append(abs(log(lam, bits)))
    return _max_enclosure(estimates), _max_enclosure(abs_logs)


def _stage2_heights(config: ProblemConfig, bits: int, log=enclose_log):
    """``h(lambda) <= const + coef * gap`` for ``lambda = lambda1 / (1 - alpha**-gap)``."""
    alpha = config.sequence.alpha
    consts, coefs = [], []
    for d in config.digits:
        tree = Div(factor_tree(config.binet_divisor * d),
                   Mul(Leaf(Fraction(config.base - 1)), Sub(Leaf(Fraction(1)), Pow(Leaf(alpha), "gap"))))
        est = height_estimate(tree, bits, log)
        consts.append(est.value)
        coefs.append(est.per_symbol["gap"])
    return _max_enclosure(consts), _max_enclosure(coefs)


def _prime_factors(n: int) -> dict:
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _primes_needed(config: ProblemConfig) -> list[int]:
    """Primes whose logarithms every height and |log lambda| is built from."""
    div = config.binet_divisor
    nums = [2, config.base, config.base - 1, config.sequence.radicand,
            config.rhs_stage1, config.rhs_stage2, *config.digits]
    for part in (div.rational_part, div.irrational_part):
        nums += [abs(part.numerator), part.denominator]
    primes = set()
    for n in nums:
        if n > 1:
            primes.update(_prime_factors(n))
    return sorted(primes)


def _proven_reason(limit: int, gap_bound: int, n_bound: int, n_max: int) -> str:
    return (f"no solution with n <= {limit}; for larger n the reductions give n - m <= {gap_bound} "
            f"and n <= {n_bound}, and the search up to {n_max} is empty")


def run_proof(config: ProblemConfig, policy: PrecisionPolicy = DEFAULT_POLICY) -> ProofCertificate:
    """Run the small search, both Matveev stages, the bound solver, both reductions and the closure."""
    cert = ProofCertificate(config=config, policy=policy)
    stage = "small_search"
    try:
        _run(cert, config, policy)
    except (ReductionFailed, ArithmeticError, ValueError) as exc:
        cert.verdict = "not-proven"
        cert.failed_stage = getattr(exc, "stage", None) or cert.failed_stage or stage
        detail = getattr(exc, "diagnostics", None)
        cert.reason = f"{type(exc).__name__}: {exc}" + (f" {detail}" if detail else "")
        log.warning("proof for %s failed: %s", config.name, cert.reason)
    return cert


def _fail_stage(cert, name):
    cert.failed_stage = name


def _run(cert: ProofCertificate, config: ProblemConfig, policy: PrecisionPolicy):
    bits = policy.initial_bits
    seq = config.sequence
    alpha = seq.alpha

    _fail_stage(cert, "small_search")
    cert.small_search = exhaustive_search(seq, config.small_search_limit, config.k_min,
                                          m_min=config.m_min, base=config.base)

    _fail_stage(cert, "nonvanishing")
    for d in config.digits:
        lam = config.lambda3_value(d)
        c1 = certify_nonvanishing(lam, alpha)
        c2 = certify_nonvanishing(lam, alpha, with_gap=True)
        cert.nonvanishing.append({"d": d, "stage1": c1.verdict, "stage2": c2.verdict,
                                  "stage1_statement": c1.statement, "stage2_statement": c2.statement})

    log_alpha = enclose_log(alpha, bits)
    log_base = enclose_log(config.base, bits)
    cert.constants = {"log_alpha": log_alpha, "log_base": log_base,
                      "log_rhs_stage1": enclose_log(config.rhs_stage1, bits),
                      "log_rhs_stage2": enclose_log(config.rhs_stage2, bits)}
    for p in _primes_needed(config):
        cert.constants[f"log_{p}"] = enclose_log(p, bits)

    _fail_stage(cert, "heights")
    h_alpha = height_exact(alpha, bits).value
    h_base = height_exact(config.base, bits).value
    h1, abs_log1 = _stage1_heights(config, bits)
    h1_rounded = ceil_sig(h1.hi)
    h2_const, h2_gap = _stage2_heights(config, bits)
    h2_const_rounded = ceil_sig(h2_const.hi)
    cert.heights = {"h_alpha": h_alpha, "h_base": h_base, "lambda3_estimate": h1,
                    "lambda3_estimate_rounded": h1_rounded, "lambda3_abs_log": abs_log1,
                    "stage2_constant": h2_const, "stage2_constant_rounded": h2_const_rounded,
                    "stage2_gap_coefficient": h2_gap}

    floor_016 = Fraction(16, 100)
    A1 = (h_alpha * D_L).max_with(abs(log_alpha)).max_with(floor_016)
    A2 = (h_base * D_L).max_with(abs(log_base)).max_with(floor_016)

    _fail_stage(cert, "stage1_matveev")
    A3 = CertifiedReal.exact(D_L * h1_rounded).max_with(abs_log1).max_with(floor_016)
    p1 = LinearFormProblem(3, D_L, (A1, A2, A3), "n")
    C1 = matveev_coefficient(p1, bits)
    C1_rounded = ceil_sig(C1.hi)
    bound1 = chain_gap_bound(C1_rounded, config.rhs_stage1, log_alpha, log_power=1, bits=bits)
    cert.stage1_matveev = {"A": [A1, A2, A3], "coefficient": C1, "coefficient_rounded": C1_rounded,
                           "bound": bound1}

    _fail_stage(cert, "stage2_matveev")
    # gap * h(alpha) <= (h(alpha)/log alpha) * K1 (1 + log n)
    gap_part = h2_gap / log_alpha * bound1.constant
    h_lam2 = next_sig((h2_const_rounded + gap_part).hi)
    A3b = CertifiedReal.exact(D_L * h_lam2)
    # |log lambda| stays far below A3b once (1 + log n) >= 1
    if not A3b.lo > abs_log1.hi + 1:
        raise ValueError("stage-2 A_3 does not dominate |log lambda|")
    p2 = LinearFormProblem(3, D_L, (A1, A2, A3b), "n", a_log_power=1)
    C2 = matveev_coefficient(p2, bits)
    C2_rounded = ceil_sig(C2.hi)
    bound2 = chain_gap_bound(C2_rounded, config.rhs_stage2, log_alpha, log_power=2, bits=bits)
    cert.stage2_matveev = {"lambda3_height_coefficient": h_lam2, "gap_part": gap_part,
                           "A": [A1, A2, A3b], "coefficient": C2, "coefficient_rounded": C2_rounded,
                           "bound": bound2}

    _fail_stage(cert, "lemma2")
    H = CertifiedReal.exact(bound2.constant) / log_alpha
    raw = lemma2_solve(2, H, bits)
    M = int(ceil_sig(raw))
    direct = certify_bound_direct(M, H, 2, bits)
    if not direct:
        raise ValueError(f"M = {M} does not satisfy M > H (1 + log M)^2")
    cert.lemma2 = {"r": 2, "H": H, "log_H": log_of(H, bits), "raw_bound": raw, "direct_check": direct}
    cert.lemma2_bound = M

    _fail_stage(cert, "linearization")
    y1 = CertifiedReal.exact(config.rhs_stage1) / (alpha ** 2).enclose(bits)
    y2 = CertifiedReal.exact(config.rhs_stage2) / (alpha ** 2).enclose(bits)
    f1 = linearize_exponential(y1, numerator=config.rhs_stage1, base=alpha)
    f2 = linearize_exponential(y2, numerator=config.rhs_stage2, base=alpha)
    cert.linearization = {"stage1": {"y": y1, "factor": f1, "assumes": "n - m >= 2"},
                          "stage2": {"y": y2, "factor": f2, "assumes": "n >= 2"}}

    _fail_stage(cert, "reduction1")
    prob1 = build_lambda_inequality("gap", seq, rhs=config.rhs_stage1, M=M, digits=config.digits,
                                    base=config.base, policy=policy)
    cf = ContinuedFractionExpansion(prob1.tau, f"log {config.base} / log alpha", policy)
    prob1.expansion = cf
    cert.expansion = cf
    red1 = reduce(prob1, strategy=config.strategy, retries=config.retries, policy=policy)
    cert.reduction1 = red1
    gap_bound = red1.w_bound

    _fail_stage(cert, "reduction2")
    prob2 = build_lambda_inequality("absolute", seq, rhs=config.rhs_stage2, M=M, digits=config.digits,
                                    base=config.base, gaps=range(1, gap_bound + 1), policy=policy)
    prob2.expansion = cf
    red2 = reduce(prob2, strategy=config.strategy, retries=config.retries, policy=policy)
    cert.reduction2 = red2
    cert.reduction_params = {"stage1": {"A": prob1.A, "M": M, "w": "n-m"},
                             "stage2": {"A": prob2.A, "M": M, "w": "n",
                                        "relations": {lab.label: list(lab.relation)
                                                      for lab in prob2.mu_family if lab.relation}}}
    n_bound = red2.w_bound

    _fail_stage(cert, "closure")
    n_max = max(n_bound, config.small_search_limit)
    closure = exhaustive_search(seq, n_max, config.k_min, m_min=config.m_min, base=config.base)
    cert.closure = {"n_max": n_max, "solutions": closure}

    problems = []
    if cert.small_search:
        problems.append(f"small search found {len(cert.small_search)} solution(s)")
    if closure:
        problems.append(f"closure search up to n={n_max} found {len(closure)} solution(s)")
    if not all(c["stage1"] and c["stage2"] for c in cert.nonvanishing):
        problems.append("a linear form could not be certified non-zero")
    cert.failed_stage = None
    if problems:
        cert.verdict, cert.reason = "not-proven", "; ".join(problems)
    else:
        cert.verdict = "proven"
        cert.reason = _proven_reason(config.small_search_limit, gap_bound, n_bound, n_max)


# ---------------------------------------------------------------------------
# emission

def _enc(x: CertifiedReal) -> dict:
    return enclosure_to_json(x, SIG)


def _frac(x: Fraction) -> str:
    """Shortest exact decimal string for a terminating rational, else ``p/q``."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    for sig in range(1, 41):
        text = to_decimal(x, sig)
        if Fraction(text) == x:
            return text
    return f"{x.numerator}/{x.denominator}"


def _bound_json(b: BoundExpression) -> dict:
    return {"constant": _frac(b.constant), "log_power": b.log_power,
            "plus_term": _enc(b.plus_term), "raw": _enc(b.raw)}


def _reduction_json(r: ReductionOutcome, params: dict) -> dict:
    relations = params.get("relations", {})
    labels = []
    for lab in r.per_label:
        item = {"label": lab.label, "method": lab.method, "q_index": lab.q_index, "q": str(lab.q),
                "epsilon": _enc(lab.epsilon), "mu": _enc(lab.mu), "w_bound": lab.w_bound,
                "attempts": lab.attempts}
        if lab.label in relations:
            item["relation"] = relations[lab.label]
        labels.append(item)
    return {"A": params["A"], "B": "alpha", "M": str(params["M"]), "w": params["w"],
            "strategy": r.strategy, "first_index": r.first_index, "q_index": r.q_index,
            "q_used": str(r.q_used), "epsilon_min": _enc(r.epsilon_min), "w_bound": r.w_bound,
            "labels": labels}


def certificate_document(cert: ProofCertificate) -> dict:
    cfg = cert.config
    doc = {
        "version": CERT_VERSION,
        "config": cfg.echo(),
        "precision": {"initial_bits": cert.policy.initial_bits, "max_bits": cert.policy.max_bits,
                      "escalation_factor": cert.policy.escalation_factor},
        "conventions": {"m_min": cfg.m_min, "k_min": cfg.k_min,
                        "small_search_range": f"1 <= n <= {cfg.small_search_limit}",
                        "d_L": D_L, "rounding": "two significant figures, outward"},
        "small_search": [s.as_dict() for s in cert.small_search],
        "nonvanishing": cert.nonvanishing,
        "constants": {k: _enc(v) for k, v in cert.constants.items()},
        "heights": {k: (_frac(v) if isinstance(v, Fraction) else _enc(v))
                    for k, v in cert.heights.items()},
        "verdict": cert.verdict,
        "reason": cert.reason,
        "failed_stage": cert.failed_stage,
    }
    if cert.stage1_matveev:
        s = cert.stage1_matveev
        doc["stage1_matveev"] = {"A": [_enc(a) for a in s["A"]], "coefficient": _enc(s["coefficient"]),
                                 "coefficient_rounded": _frac(s["coefficient_rounded"]),
                                 "bound": _bound_json(s["bound"])}
    if cert.stage2_matveev:
        s = cert.stage2_matveev
        doc["stage2_matveev"] = {"lambda3_height_coefficient": _frac(s["lambda3_height_coefficient"]),
                                 "gap_part": _enc(s["gap_part"]),
                                 "A": [_enc(a) for a in s["A"]], "coefficient": _enc(s["coefficient"]),
                                 "coefficient_rounded": _frac(s["coefficient_rounded"]),
                                 "bound": _bound_json(s["bound"])}
    if cert.lemma2:
        doc["lemma2"] = {"r": cert.lemma2["r"], "H": _enc(cert.lemma2["H"]),
                         "log_H": _enc(cert.lemma2["log_H"]), "raw_bound": str(cert.lemma2["raw_bound"]),
                         "direct_check": cert.lemma2["direct_check"]}
        doc["lemma2_bound"] = str(cert.lemma2_bound)
    if cert.linearization:
        doc["linearization"] = {k: {"y": _enc(v["y"]), "factor": v["factor"], "assumes": v["assumes"]}
                                for k, v in cert.linearization.items()}
    if cert.expansion is not None:
        cf = cert.expansion
        doc["continued_fraction"] = {"tau_source": cf.source,
                                     "tau": _enc(cf.tau(cf.bits)),
                                     "partial_quotients": list(cf.partial_quotients)}
    if cert.reduction1:
        doc["reduction1"] = _reduction_json(cert.reduction1, cert.reduction_params["stage1"])
        doc["q_stage1"] = str(cert.reduction1.q_used)
        doc["epsilon_stage1"] = _enc(cert.reduction1.epsilon_min)
        doc["gap_bound"] = cert.reduction1.w_bound
    if cert.reduction2:
        doc["reduction2"] = _reduction_json(cert.reduction2, cert.reduction_params["stage2"])
        doc["q_stage2"] = str(cert.reduction2.q_used)
        doc["epsilon_stage2"] = _enc(cert.reduction2.epsilon_min)
        doc["n_bound"] = cert.reduction2.w_bound
    if cert.closure:
        doc["closure"] = {"n_max": cert.closure["n_max"],
                          "solutions": [s.as_dict() for s in cert.closure["solutions"]]}
    return doc


def _short(x) -> str:
    """Two-figure values as ``9.8e13``; anything else exactly."""
    x = Fraction(x)
    return to_decimal(x, 2) if x > 0 and ceil_sig(x) == x else _frac(x)


def _text(cert: ProofCertificate) -> str:
    cfg = cert.config
    out = [f"Certificate ({CERT_VERSION}) for {cfg.name}: U_n - U_m = d (10^k - 1)/9",
           f"recurrence U_(n+1) = {cfg.sequence.coeff_p} U_n - {cfg.sequence.coeff_q} U_(n-1), "
           f"U_0 = {cfg.sequence.u0}, U_1 = {cfg.sequence.u1}; alpha = {cfg.sequence.alpha}",
           f"Binet divisor {cfg.binet_divisor}; digits {cfg.digits[0]}..{cfg.digits[-1]}; "
           f"k >= {cfg.k_min}; m >= {cfg.m_min}", ""]
    sols = ", ".join(f"({s.n},{s.m},{s.d},{s.k})" for s in cert.small_search) or "none"
    out.append(f"1. Search 1 <= n <= {cfg.small_search_limit}: solutions {sols}.")
    if cert.nonvanishing:
        ok = all(c["stage1"] and c["stage2"] for c in cert.nonvanishing)
        out.append(f"2. Linear forms are non-zero for every d: {ok}.")
    c = cert.constants
    if c:
        out.append(f"   log alpha = {format_enclosure(c['log_alpha'])}, "
                   f"log {cfg.base} = {format_enclosure(c['log_base'])}")
    h = cert.heights
    if h:
        out.append(f"3. h(alpha) = {format_enclosure(h['h_alpha'])}, h({cfg.base}) = "
                   f"{format_enclosure(h['h_base'])}, h(lambda) <= "
                   f"{format_enclosure(h['lambda3_estimate'])} < {_short(h['lambda3_estimate_rounded'])}")
    if cert.stage1_matveev:
        s = cert.stage1_matveev
        out.append(f"4. Matveev (stage 1): A = {', '.join(format_enclosure(a) for a in s['A'])}")
        out.append(f"   C = {format_enclosure(s['coefficient'])} <= {_short(s['coefficient_rounded'])}; "
                   f"(n-m) log alpha < log {cfg.rhs_stage1} + C (1 + log n) < "
                   f"{_short(s['bound'].constant)} (1 + log n)")
    if cert.stage2_matveev:
        s = cert.stage2_matveev
        out.append(f"5. h(lambda') < {_short(h['stage2_constant_rounded'])} + (n-m) h(alpha) < "
                   f"{_short(s['lambda3_height_coefficient'])} (1 + log n)")
        out.append(f"   C = {format_enclosure(s['coefficient'])} <= {_short(s['coefficient_rounded'])}; "
                   f"n log alpha < {_short(s['bound'].constant)} (1 + log n)^2")
    if cert.lemma2:
        out.append(f"6. H = {format_enclosure(cert.lemma2['H'])}; n < {cert.lemma2['raw_bound']} "
                   f"<= M = {to_decimal(cert.lemma2_bound, 2)}")
    for key, red, what in (("stage1", cert.reduction1, "n - m"), ("stage2", cert.reduction2, "n")):
        if red is None:
            continue
        params = cert.reduction_params[key]
        special = [lab for lab in red.per_label if lab.method != "lemma"]
        out.append(f"7{'a' if key == 'stage1' else 'b'}. Reduction ({len(red.per_label)} values of mu, "
                   f"A = {params['A']}, B = alpha, M = {to_decimal(params['M'], 2)}): first q > 6M is "
                   f"q_{red.first_index}; binding q_{red.q_index} = {red.q_used}")
        out.append(f"    min eps = {format_enclosure(red.epsilon_min)}; {what} <= {red.w_bound}")
        for lab in special:
            out.append(f"    {lab.label}: mu = {float(lab.mu.mid):.6g} is an integer combination of 1 and tau; "
                       f"||q_{lab.q_index} tau|| bound gives {what} <= {lab.w_bound}")
    if cert.closure:
        out.append(f"8. Closure search up to n = {cert.closure['n_max']}: "
                   f"{len(cert.closure['solutions'])} solution(s).")
    out.append("")
    out.append(f"Verdict: {cert.verdict}. {cert.reason}")
    return "\n".join(out) + "\n"


def emit_certificate(cert: ProofCertificate, format: str = "structured") -> str:
    if format == "structured":
        return json.dumps(certificate_document(cert), indent=2, sort_keys=True) + "\n"
    if format == "text":
        return _text(cert)
    raise ValueError(f"unknown certificate format {format!r}")


# ---------------------------------------------------------------------------
# revalidation

TIGHT = Fraction(1, 10 ** 30)


def _tight(x: CertifiedReal, rel=TIGHT) -> bool:
    return x.lo <= x.hi and x.width <= rel * max(1, abs(x.lo), abs(x.hi))


def _same(a: CertifiedReal, b: CertifiedReal) -> bool:
    """Two enclosures of one real: both tight and overlapping."""
    return _tight(a) and _tight(b) and a.overlaps(b)


def _enclosures(obj, path=""):
    if isinstance(obj, dict):
        if set(obj) == {"lo", "hi"}:
            yield path, obj
            return
        for k, v in obj.items():
            yield from _enclosures(v, f"{path}.{k}" if path else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _enclosures(v, f"{path}[{i}]")


def _stored_log(primes: dict, alpha: QuadraticNumber, log_alpha: CertifiedReal):
    """A ``log(x, bits)`` provider built only from stored prime logarithms and ``log alpha``."""
    def log(x, bits=None):
        if isinstance(x, QuadraticNumber):
            if x == alpha:
                return log_alpha
            square = x * x
            if x.sign() > 0 and square.is_rational():
                return log(square.to_fraction()) / 2
            raise ValueError(f"no stored logarithm for {x}")
        x = Fraction(x)
        total = CertifiedReal.exact(0)
        for part, sign in ((x.numerator, 1), (x.denominator, -1)):
            for p, e in _prime_factors(part).items():
                if p not in primes:
                    raise ValueError(f"no stored logarithm for the prime {p}")
                total = total + primes[p] * (sign * e)
        return total
    return log


def revalidate(doc: dict) -> list[str]:
    """Re-check a structured certificate using exact arithmetic only.

    No logarithm is evaluated.  The stored enclosures of ``log p`` (small
    primes) and ``log alpha`` are the only transcendental inputs; they are
    tied to each other through ``log base``, the stored continued fraction
    (which pins ``tau`` to about q_N**-2) and every stage-1 ``mu``.  All
    other stored numbers are re-derived from them and compared.  Returns a
    list of problems; empty means the certificate is consistent.
    """
    from .certified import enclose_sqrt
    from .certified import nearest_integer_distance as nid
    from .quadratic import parse_quadratic
    from .recurrence import SequenceSpec

    errors = []

    def check(cond, msg):
        if not cond:
            errors.append(msg)

    def E(obj) -> CertifiedReal:
        return enclosure_from_json(obj)

    if doc.get("version") != CERT_VERSION:
        return [f"unsupported version {doc.get('version')!r}"]
    try:
        c = doc["config"]
        s = c["sequence"]
        seq = SequenceSpec(s["coeff_p"], s["coeff_q"], s["u0"], s["u1"], s["name"])
        cfg = ProblemConfig(seq, parse_quadratic(c["binet_divisor"], seq.radicand), c["rhs_stage1"],
                            c["rhs_stage2"], tuple(c["digits"]), c["base"], c["small_search_limit"],
                            c["k_min"], c["m_min"], c["lambda3"], c["strategy"], c["retries"], c["name"])
    except (KeyError, ValueError, TypeError) as exc:
        return [f"config: {exc}"]
    alpha = seq.alpha

    try:
        for path, obj in _enclosures(doc):
            check(_tight(E(obj)), f"{path}: enclosure is inverted or too wide")

        conv = doc["conventions"]
        check(conv == {"m_min": cfg.m_min, "k_min": cfg.k_min,
                       "small_search_range": f"1 <= n <= {cfg.small_search_limit}",
                       "d_L": D_L, "rounding": "two significant figures, outward"},
              "conventions do not match the config")

        small = exhaustive_search(seq, cfg.small_search_limit, cfg.k_min, m_min=cfg.m_min, base=cfg.base)
        check([x.as_dict() for x in small] == doc["small_search"], "small_search does not match a re-run")

        nonvanishing = []
        for d in cfg.digits:
            lam = cfg.lambda3_value(d)
            c1 = certify_nonvanishing(lam, alpha)
            c2 = certify_nonvanishing(lam, alpha, with_gap=True)
            nonvanishing.append({"d": d, "stage1": c1.verdict, "stage2": c2.verdict,
                                 "stage1_statement": c1.statement, "stage2_statement": c2.statement})
        check(nonvanishing == doc["nonvanishing"], "nonvanishing record does not match a re-run")

        # transcendental inputs and their mutual relations
        k = doc["constants"]
        log_alpha, log_base = E(k["log_alpha"]), E(k["log_base"])
        primes = {int(key[4:]): E(v) for key, v in k.items() if key[4:].isdigit()}
        check(sorted(primes) == _primes_needed(cfg), "constants: prime logarithm table incomplete")
        log = _stored_log(primes, alpha, log_alpha)
        check(_same(log_base, log(cfg.base)), "constants.log_base disagrees with its prime factors")
        check(_same(E(k["log_rhs_stage1"]), log(cfg.rhs_stage1)), "constants.log_rhs_stage1 mismatch")
        check(_same(E(k["log_rhs_stage2"]), log(cfg.rhs_stage2)), "constants.log_rhs_stage2 mismatch")

        cf = doc["continued_fraction"]
        tau = E(cf["tau"])
        quotients = cf["partial_quotients"]
        check(cylinder_contains(quotients, tau), "continued_fraction quotients do not match tau")
        check(cf["tau_source"] == f"log {cfg.base} / log alpha", "continued_fraction.tau_source mismatch")
        check(_same(tau, log_base / log_alpha), "continued_fraction.tau is not log base / log alpha")
        convs = []
        for i, a in enumerate(quotients):
            p1, q1 = convs[i - 1] if i >= 1 else (1, 0)
            p2, q2 = convs[i - 2] if i >= 2 else ((1, 0) if i == 1 else (0, 1))
            convs.append((a * p1 + p2, a * q1 + q2))
        qs = [q for _, q in convs]

        # heights
        h = doc["heights"]
        h_alpha, h_base = E(h["h_alpha"]), E(h["h_base"])
        check(_same(h_alpha, log_alpha / 2), "heights.h_alpha is not log alpha / 2")
        check(_same(h_base, height_exact(cfg.base, log=log).value), "heights.h_base mismatch")
        h1, abs_log1 = _stage1_heights(cfg, 0, log)
        h2c, h2g = _stage2_heights(cfg, 0, log)
        check(_same(E(h["lambda3_estimate"]), h1), "heights.lambda3_estimate mismatch")
        check(_same(E(h["lambda3_abs_log"]), abs_log1), "heights.lambda3_abs_log mismatch")
        check(_same(E(h["stage2_constant"]), h2c), "heights.stage2_constant mismatch")
        check(_same(E(h["stage2_gap_coefficient"]), h2g), "heights.stage2_gap_coefficient mismatch")
        h1r = Fraction(h["lambda3_estimate_rounded"])
        check(h1r == ceil_sig(h1.hi), "heights.lambda3_estimate_rounded is not the rounded estimate")
        h2r = Fraction(h["stage2_constant_rounded"])
        check(h2r == ceil_sig(h2c.hi), "heights.stage2_constant_rounded is not the rounded estimate")

        floor_016 = Fraction(16, 100)
        A1 = (h_alpha * D_L).max_with(abs(log_alpha)).max_with(floor_016)
        A2 = (h_base * D_L).max_with(abs(log_base)).max_with(floor_016)

        def matveev_check(key, A3, log_power, rhs_log):
            st = doc[key]
            A = [E(a) for a in st["A"]]
            for j, (got, want) in enumerate(zip(A, (A1, A2, A3))):
                check(_same(got, want), f"{key}.A[{j}] mismatch")
            C = CertifiedReal.exact(Fraction(14, 10) * 30 ** 6 * 3 ** 4 * D_L * D_L)
            C = C * enclose_sqrt(3, 256) * (1 + log(D_L))
            for a in (A1, A2, A3):
                C = C * a
            stored = E(st["coefficient"])
            check(_same(C, stored), f"{key}.coefficient does not match the product of its factors")
            rounded = Fraction(st["coefficient_rounded"])
            check(rounded == ceil_sig(C.hi), f"{key}.coefficient_rounded is not the outward rounding")
            b = st["bound"]
            check(b["log_power"] == log_power, f"{key}.bound.log_power must be {log_power}")
            plus = E(b["plus_term"])
            check(_same(plus, rhs_log), f"{key}.bound.plus_term is not log(rhs)")
            check(_same(E(b["raw"]), rounded + rhs_log), f"{key}.bound.raw mismatch")
            check(Fraction(b["constant"]) == next_sig((rounded + rhs_log).hi),
                  f"{key}.bound.constant is not the folded bound")
            return Fraction(b["constant"])

        A3 = CertifiedReal.exact(D_L * h1r).max_with(abs_log1).max_with(floor_016)
        K1 = matveev_check("stage1_matveev", A3, 1, log(cfg.rhs_stage1))
        st2 = doc["stage2_matveev"]
        gap_part = h2g / log_alpha * K1
        check(_same(E(st2["gap_part"]), gap_part), "stage2_matveev.gap_part mismatch")
        h_lam2 = Fraction(st2["lambda3_height_coefficient"])
        check(h_lam2 == next_sig((h2r + gap_part).hi), "stage2_matveev.lambda3_height_coefficient mismatch")
        check(CertifiedReal.exact(D_L * h_lam2).lo > abs_log1.hi + 1, "stage-2 A_3 does not dominate |log lambda|")
        K2 = matveev_check("stage2_matveev", CertifiedReal.exact(D_L * h_lam2), 2, log(cfg.rhs_stage2))

        l2 = doc["lemma2"]
        check(l2["r"] == 2, "lemma2.r must be 2")
        H = CertifiedReal.exact(K2) / log_alpha
        check(_same(E(l2["H"]), H), "lemma2.H is not bound / log alpha")
        check(H.lo > 64, "lemma2 hypothesis H > (4 r^2)^r fails")
        logH = E(l2["log_H"])
        # log H = log K2 - log log alpha: only its consistency with H is checked, via e^x >= 1 + x
        check(logH.lo > 0 and 1 + logH.lo <= H.hi, "lemma2.log_H inconsistent with H")
        raw = int(l2["raw_bound"])
        check(raw == ceil((4 * H * logH * logH).hi), "lemma2.raw_bound is not ceil(4 H (log H)^2)")
        M = int(doc["lemma2_bound"])
        check(M == int(ceil_sig(raw)), "lemma2_bound is not the rounded solver output")
        # direct check with the rational bound log M <= digits(M) * log 10
        log_M_upper = len(str(M)) * log(10).hi
        check(l2["direct_check"] is True and M > (H * (1 + log_M_upper) ** 2).hi,
              "lemma2: M > H (1 + log M)^2 not confirmed")

        alpha2 = (alpha ** 2).enclose(256)
        for key, rhs, assumes in (("stage1", cfg.rhs_stage1, "n - m >= 2"), ("stage2", cfg.rhs_stage2, "n >= 2")):
            lin = doc["linearization"][key]
            y = E(lin["y"])
            check(_same(y, CertifiedReal.exact(rhs) / alpha2), f"linearization.{key}.y mismatch")
            check(y.hi < Fraction(1, 2) and lin["factor"] == 2 and lin["assumes"] == assumes,
                  f"linearization.{key} hypothesis not met")

        gap_bound = doc["reduction1"]["w_bound"]
        n_bound = doc["reduction2"]["w_bound"]
        for key, rhs, w_name, expect_labels in (
                ("reduction1", cfg.rhs_stage1, "n-m", [f"d={d}" for d in cfg.digits]),
                ("reduction2", cfg.rhs_stage2, "n",
                 [f"d={d},gap={g}" for d in cfg.digits for g in range(1, gap_bound + 1)])):
            red = doc[key]
            A = red["A"]
            check(A == ceil((CertifiedReal.exact(2 * rhs) / log_alpha).hi), f"{key}.A is not ceil(2 rhs / log alpha)")
            check(int(red["M"]) == M, f"{key}.M differs from lemma2_bound")
            check(red["B"] == "alpha" and red["w"] == w_name, f"{key}: B or w mislabelled")
            check(red["strategy"] == cfg.strategy, f"{key}.strategy differs from the config")
            first = red["first_index"]
            check(qs[first] > 6 * M and (first == 0 or qs[first - 1] <= 6 * M),
                  f"{key}.first_index is not the first q > 6M")
            check([lab["label"] for lab in red["labels"]] == expect_labels,
                  f"{key} labels do not cover the required family")
            lemma = []
            for lab in red["labels"]:
                name = f"{key}/{lab['label']}"
                i, q, w = lab["q_index"], int(lab["q"]), lab["w_bound"]
                check(qs[i] == q, f"{name}: q is not the stored convergent")
                mu = E(lab["mu"])
                d_s, _, g_s = lab["label"].partition(",")
                d = int(d_s.split("=")[1])
                g = int(g_s.split("=")[1]) if g_s else None
                lam = cfg.lambda3_value(d)
                if g is None:
                    check(_same(mu * log_alpha, log(lam)), f"{name}: mu is not log(lambda) / log alpha")
                else:
                    lam = lam / (1 - alpha ** (-g))
                if lab["method"] == "lemma":
                    check(q > 6 * M, f"{name}: q <= 6M")
                    check(first <= i <= first + cfg.retries and lab["attempts"] == i - first + 1,
                          f"{name}: convergent outside the retry window")
                    eps = nid(mu * q) - nid(tau * q) * M
                    check(eps.lo > 0, f"{name}: eps not positive")
                    check(_same(eps, E(lab["epsilon"])), f"{name}: stored eps disagrees with mu, tau, q")
                    lemma.append((i, E(lab["epsilon"])))
                    numerator = A * q
                elif lab["method"] == "best-approximation":
                    a, b = lab["relation"]
                    check(lam == QuadraticNumber.from_rational(Fraction(cfg.base) ** a, alpha.D) * alpha ** b,
                          f"{name}: relation is not exact")
                    check(_same(mu, tau * a + b), f"{name}: mu is not a tau + b")
                    check(qs[i + 1] > M + abs(a) and qs[i] <= M + abs(a),
                          f"{name}: q_(N+1) > M + |a| >= q_N fails")
                    check(lab["attempts"] == 1, f"{name}: attempts must be 1")
                    eps = nid(tau * q)
                    check(eps.lo > 0 and _same(eps, E(lab["epsilon"])), f"{name}: ||q tau|| mismatch")
                    numerator = A
                else:
                    check(False, f"{name}: unknown method {lab['method']!r}")
                    continue
                if eps.lo > 0:
                    # w = floor(log(numerator/eps)/log alpha)  <=>  alpha^w eps <= numerator < alpha^(w+1) eps
                    upper = (alpha ** (w + 1)).enclose(400) * eps.lo
                    lower = (alpha ** w).enclose(400) * eps.hi
                    check(upper.lo > numerator, f"{name}: w_bound too small")
                    check(lower.hi <= numerator, f"{name}: w_bound not the floor")
            check(red["w_bound"] == max(lab["w_bound"] for lab in red["labels"]),
                  f"{key}.w_bound is not the maximum over labels")
            if lemma:
                binding = max(i for i, _ in lemma)
                check(red["q_index"] == binding and red["q_used"] == str(qs[binding]),
                      f"{key}: binding convergent is not the largest index used")
                if cfg.strategy == "shared":
                    check(len({i for i, _ in lemma}) == 1, f"{key}: shared strategy used several convergents")
                emin = min((e for _, e in lemma), key=lambda e: e.lo)
                check(_same(E(red["epsilon_min"]), emin), f"{key}.epsilon_min is not the minimum")
        check(doc["q_stage1"] == doc["reduction1"]["q_used"], "q_stage1 differs from reduction1")
        check(doc["q_stage2"] == doc["reduction2"]["q_used"], "q_stage2 differs from reduction2")
        check(doc["epsilon_stage1"] == doc["reduction1"]["epsilon_min"], "epsilon_stage1 differs from reduction1")
        check(doc["epsilon_stage2"] == doc["reduction2"]["epsilon_min"], "epsilon_stage2 differs from reduction2")
        check(doc["gap_bound"] == gap_bound and doc["n_bound"] == n_bound, "summary bounds differ")

        n_max = max(n_bound, cfg.small_search_limit)
        check(doc["closure"]["n_max"] == n_max, "closure.n_max is not max(n_bound, small_search_limit)")
        closure = exhaustive_search(seq, n_max, cfg.k_min, m_min=cfg.m_min, base=cfg.base)
        check([x.as_dict() for x in closure] == doc["closure"]["solutions"], "closure does not match a re-run")
        nonvanishing_ok = all(x["stage1"] and x["stage2"] for x in nonvanishing)
        proven = not small and not closure and nonvanishing_ok and not errors
        check(doc["verdict"] == ("proven" if proven else "not-proven"), "verdict inconsistent with the record")
        if doc["verdict"] == "proven":
            check(doc["failed_stage"] is None, "failed_stage set on a proven certificate")
            check(doc["reason"] == _proven_reason(cfg.small_search_limit, gap_bound, n_bound, n_max),
                  "reason does not match the bounds")
    except (KeyError, IndexError, TypeError, ValueError, ZeroDivisionError, AttributeError) as exc:
        errors.append(f"malformed certificate: {type(exc).__name__}: {exc}")
    return errors
