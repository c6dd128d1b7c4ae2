"""Certified continued fractions and Baker-Davenport reduction.

The reduction bounds ``w`` in ``0 < |u*tau - v + mu| < A * B**-w`` with
``1 <= u <= M``: pick a convergent denominator ``q > 6M`` and, if
``eps = ||mu q|| - M ||tau q|| > 0``, every solution has
``w < log(A q / eps) / log B``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import ceil, floor
from typing import Optional, Sequence

from .certified import (DEFAULT_POLICY, CertifiedReal, PrecisionExhausted,
                        PrecisionPolicy, Recipe, Sign, certified_floor,
                        certified_sign, enclose_log, log_of,
                        nearest_integer_distance)
from .quadratic import QuadraticNumber

log = logging.getLogger(__name__)

DEFAULT_RETRIES = 10


class ReductionFailed(RuntimeError):
    """No admissible convergent certified ``eps > 0`` for some label."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


def cached_recipe(fn: Recipe) -> Recipe:
    return lru_cache(maxsize=None)(fn)


def log_ratio_recipe(num, den) -> Recipe:
    """Recipe for ``log(num) / log(den)``."""
    @lru_cache(maxsize=None)
    def recipe(bits: int) -> CertifiedReal:
        return (enclose_log(num, bits + 16) / enclose_log(den, bits + 16)).round_out(bits + 8)
    return recipe


# ---------------------------------------------------------------------------
# continued fractions

class ContinuedFractionExpansion:
    """Lazily extended, certified continued fraction of an irrational ``tau``.

    Partial quotient ``a_i`` is accepted only when the complete quotient
    ``x_i = (p_{i-2} - q_{i-2} t) / (q_{i-1} t - p_{i-1})``, a monotone map of
    ``t``, has the same floor at both ends of the current enclosure of tau.
    """

    def __init__(self, tau: Recipe, source: str = "tau", policy: PrecisionPolicy = DEFAULT_POLICY):
        self.tau = tau
        self.source = source
        self.policy = policy
        self.partial_quotients: list[int] = []
        self.convergents: list[tuple[int, int]] = []
        self.terminated = False
        self._schedule = iter(policy.schedule())
        self.bits = next(self._schedule)
        self._enc = tau(self.bits)

    def _escalate(self):
        try:
            self.bits = next(self._schedule)
        except StopIteration:
            raise PrecisionExhausted(
                f"continued fraction of {self.source} stalled at index "
                f"{len(self.partial_quotients)}") from None
        self._enc = self.tau(self.bits)

    def _convergent(self, j: int) -> tuple[int, int]:
        if j >= 0:
            return self.convergents[j]
        return (1, 0) if j == -1 else (0, 1)

    def _next_quotient(self) -> Optional[int]:
        i = len(self.partial_quotients)
        p1, q1 = self._convergent(i - 1)
        p2, q2 = self._convergent(i - 2)
        while True:
            enc = self._enc
            vals = []
            for t in (enc.lo, enc.hi):
                den = q1 * t - p1
                vals.append(None if den == 0 else (p2 - q2 * t) / den)
            if enc.is_exact() and vals[0] is None:
                return None  # rational tau, expansion finished
            if None not in vals and (vals[0] > 0) == (vals[1] > 0):
                a_lo, a_hi = floor(vals[0]), floor(vals[1])
                if a_lo == a_hi and (i == 0 or a_lo >= 1):
                    return a_lo
            self._escalate()

    def ensure(self, index: int) -> bool:
        """Expand through ``index``; False if tau is rational and ends earlier."""
        while len(self.partial_quotients) <= index:
            if self.terminated:
                return False
            a = self._next_quotient()
            if a is None:
                self.terminated = True
                return False
            i = len(self.partial_quotients)
            p1, q1 = self._convergent(i - 1)
            p2, q2 = self._convergent(i - 2)
            p, q = a * p1 + p2, a * q1 + q2
            self.partial_quotients.append(a)
            self.convergents.append((p, q))
        return True

    def q(self, i: int) -> int:
        if not self.ensure(i):
            raise IndexError(f"expansion of {self.source} has no index {i}")
        return self.convergents[i][1]

    def p(self, i: int) -> int:
        if not self.ensure(i):
            raise IndexError(f"expansion of {self.source} has no index {i}")
        return self.convergents[i][0]


def cf_expand(tau: Recipe, count: int, source: str = "tau",
              policy: PrecisionPolicy = DEFAULT_POLICY) -> ContinuedFractionExpansion:
    """First ``count + 1`` partial quotients and convergents (fewer if tau is rational)."""
    cf = ContinuedFractionExpansion(tau, source, policy)
    cf.ensure(count)
    return cf


def find_denominator_exceeding(cf: ContinuedFractionExpansion, threshold: int) -> tuple[int, int]:
    """Smallest index ``i`` with ``q_i > threshold``."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    i = 0
    while True:
        q = cf.q(i)
        if q > threshold:
            return i, q
        i += 1


def cylinder_contains(quotients: Sequence[int], enc: CertifiedReal) -> bool:
    """True if every real in ``enc`` has continued fraction beginning with ``quotients``.

    Exact rational re-check used when revalidating certificates.
    """
    for t in (enc.lo, enc.hi):
        x = t
        for i, a in enumerate(quotients):
            if floor(x) != a or (i + 1 < len(quotients) and x == a):
                return False
            if i + 1 < len(quotients):
                x = 1 / (x - a)
    return True


# ---------------------------------------------------------------------------
# reduction

@dataclass(frozen=True)
class MuLabel:
    """One ``mu`` value.  ``relation = (a, b)`` records an exact ``mu = a*tau + b``."""
    label: str
    recipe: Recipe = field(compare=False)
    relation: Optional[tuple[int, int]] = None


@dataclass
class ReductionProblem:
    tau: Recipe
    mu_family: list
    A: int
    B: object              # QuadraticNumber or rational, > 1
    M: int
    w_name: str = "w"
    tau_source: str = "log 10 / log alpha"
    expansion: Optional[ContinuedFractionExpansion] = None

    def __post_init__(self):
        if not self.A > 0:
            raise ValueError("A must be positive")
        if not self.B > 1:
            raise ValueError("B must exceed 1")
        if self.M < 1:
            raise ValueError("M must be >= 1")


@dataclass(frozen=True)
class LabelOutcome:
    label: str
    method: str                 # "lemma" or "best-approximation"
    q_index: int
    q: int
    epsilon: CertifiedReal      # eps for "lemma", ||q tau|| for "best-approximation"
    mu: CertifiedReal
    w_bound: int
    attempts: int = 1


@dataclass(frozen=True)
class ReductionOutcome:
    q_used: int
    q_index: int
    first_index: int
    epsilon_min: CertifiedReal
    w_bound: int
    per_label: tuple
    strategy: str

    @property
    def per_label_epsilon(self) -> dict:
        return {lab.label: lab.epsilon for lab in self.per_label if lab.method == "lemma"}


def _epsilon_recipe(mu: Recipe, tau: Recipe, q: int, M: int) -> Recipe:
    def recipe(bits: int) -> CertifiedReal:
        return (nearest_integer_distance(mu(bits) * q)
                - nearest_integer_distance(tau(bits) * q) * M)
    return recipe


def _first_positive_bits(recipe: Recipe, policy: PrecisionPolicy) -> Optional[int]:
    if certified_sign(refine=recipe, policy=policy) is not Sign.POSITIVE:
        return None
    return next(b for b in policy.schedule() if recipe(b).lo > 0)


def _w_floor(numerator, epsilon: Recipe, B, policy: PrecisionPolicy, start_bits: int) -> int:
    """Certified ``floor(log(numerator / eps) / log B)``, starting where ``eps > 0`` is known."""
    def recipe(bits: int) -> CertifiedReal:
        eps = epsilon(bits)
        return log_of(CertifiedReal.coerce(numerator) / eps, bits) / enclose_log(B, bits)
    start = PrecisionPolicy(start_bits, max(start_bits, policy.max_bits), policy.escalation_factor)
    return certified_floor(refine=recipe, policy=start)


def _record_bits(bits: int, scale: int) -> int:
    """Precision for the recorded enclosures, enough to recheck eps after multiplying by ``scale``."""
    return max(bits, 2 * scale.bit_length() + 64)


def reduce(problem: ReductionProblem, *, strategy: str = "per_label",
           retries: int = DEFAULT_RETRIES, policy: PrecisionPolicy = DEFAULT_POLICY) -> ReductionOutcome:
    """Apply the reduction to every ``mu`` in the family.

    ``strategy="per_label"`` gives each ``mu`` the first convergent
    ``q > 6M`` (within ``retries`` further ones) that certifies ``eps > 0``;
    ``"shared"`` insists on one convergent for the whole family.  Labels with
    an exact relation ``mu = a tau + b`` cannot have ``eps > 0`` and are
    bounded through ``||u tau|| >= ||q_N tau||`` for ``0 < u < q_{N+1}``.
    """
    if strategy not in ("per_label", "shared"):
        raise ValueError(f"unknown strategy {strategy!r}")
    cf = problem.expansion or ContinuedFractionExpansion(problem.tau, problem.tau_source, policy)
    first, _ = find_denominator_exceeding(cf, 6 * problem.M)
    tau, A, B, M = problem.tau, problem.A, problem.B, problem.M

    outcomes: dict[str, LabelOutcome] = {}
    generic = [lab for lab in problem.mu_family if lab.relation is None]
    failures = {}

    def try_label(lab: MuLabel, i: int) -> Optional[LabelOutcome]:
        q = cf.q(i)
        eps = _epsilon_recipe(lab.recipe, tau, q, M)
        bits = _first_positive_bits(eps, policy)
        if bits is None:
            return None
        w = _w_floor(A * q, eps, B, policy, bits)
        rec = _record_bits(bits, q * M)
        return LabelOutcome(lab.label, "lemma", i, q, eps(rec), lab.recipe(rec), w,
                            i - first + 1)

    if strategy == "per_label":
        for lab in generic:
            for i in range(first, first + retries + 1):
                res = try_label(lab, i)
                if res is not None:
                    outcomes[lab.label] = res
                    break
            else:
                failures[lab.label] = f"eps not certified positive for indices {first}..{first + retries}"
    else:
        for i in range(first, first + retries + 1):
            trial = {}
            for lab in generic:
                res = try_label(lab, i)
                if res is None:
                    break
                trial[lab.label] = res
            else:
                outcomes.update(trial)
                break
        else:
            failures["*"] = f"no shared convergent in {first}..{first + retries} certifies every eps"

    if failures:
        raise ReductionFailed(f"reduction failed for {len(failures)} label(s)", failures)

    for lab in problem.mu_family:
        if lab.relation is None:
            continue
        a, _ = lab.relation
        n = 0
        while cf.q(n + 1) <= M + abs(a):
            n += 1
        qn = cf.q(n)

        def delta(bits, qn=qn):
            return nearest_integer_distance(tau(bits) * qn)

        bits = _first_positive_bits(delta, policy)
        if bits is None:
            raise ReductionFailed("||q tau|| not certified positive", {lab.label: "tau rational?"})
        w = _w_floor(A, delta, B, policy, bits)
        rec = _record_bits(bits, qn)
        outcomes[lab.label] = LabelOutcome(lab.label, "best-approximation", n, qn,
                                           delta(rec), lab.recipe(rec), w)

    ordered = tuple(outcomes[lab.label] for lab in problem.mu_family)
    lemma = [o for o in ordered if o.method == "lemma"]
    binding = max(lemma, key=lambda o: o.q_index) if lemma else ordered[0]
    eps_min = min((o.epsilon for o in lemma), key=lambda e: e.lo) if lemma else binding.epsilon
    w_bound = max(o.w_bound for o in ordered)
    log.debug("reduction: first index %d, binding index %d, w <= %d", first, binding.q_index, w_bound)
    return ReductionOutcome(binding.q, binding.q_index, first, eps_min, w_bound, ordered, strategy)


# ---------------------------------------------------------------------------
# assembling the inequalities

def detect_relation(lam: QuadraticNumber, alpha: QuadraticNumber, base: int) -> Optional[tuple[int, int]]:
    """Find ``(a, b)`` with ``lam = base**a * alpha**b`` exactly, if any.

    Only attempted when alpha is a unit (norm +-1); then ``|N(lam)|`` must be
    ``base**(2a)``.
    """
    if abs(alpha.norm()) != 1:
        return None
    norm = abs(lam.norm())
    a = 0
    target = Fraction(1)
    step = Fraction(base * base)
    if norm >= 1:
        while target < norm:
            target *= step
            a += 1
    else:
        while target > norm:
            target /= step
            a -= 1
    if target != norm:
        return None
    unit = lam / (QuadraticNumber.from_rational(Fraction(base) ** a, alpha.D))
    approx = float(enclose_log(unit if unit.sign() > 0 else -unit, 64).mid) / float(enclose_log(alpha, 64).mid)
    for b in (floor(approx), floor(approx) + 1):
        if alpha ** b == unit:
            return a, b
    return None


def build_lambda_inequality(stage: str, sequence, *, rhs: int, M: int, digits=range(1, 10),
                            base: int = 10, gaps: Sequence[int] = (),
                            policy: PrecisionPolicy = DEFAULT_POLICY) -> ReductionProblem:
    """Turn ``|Gamma| < rhs / alpha**w`` into a reduction problem.

    ``stage="gap"``: ``lambda = d * divisor / (base - 1)``, ``w = n - m``.
    ``stage="absolute"``: ``lambda = d * divisor / ((base - 1)(1 - alpha**-g))``
    over ``g`` in ``gaps``, ``w = n``.
    Linearising gives ``|Lambda| < 2 rhs / alpha**w``; dividing by
    ``log alpha`` yields ``A = ceil(2 rhs / log alpha)``.
    """
    if stage not in ("gap", "absolute"):
        raise ValueError(f"unknown stage {stage!r}")
    alpha = sequence.alpha
    divisor = sequence.binet_divisor
    bits = policy.initial_bits
    log_alpha = enclose_log(alpha, bits)
    A_real = CertifiedReal.exact(2 * rhs) / log_alpha
    A = ceil(A_real.hi)
    tau = log_ratio_recipe(base, alpha)

    family = []
    for d in digits:
        lam1 = divisor * d / (base - 1)
        if stage == "gap":
            lams = [(f"d={d}", lam1)]
        else:
            lams = [(f"d={d},gap={g}", lam1 / (1 - alpha ** (-g))) for g in gaps]
        for label, lam in lams:
            if lam.sign() <= 0:
                raise ValueError(f"lambda for {label} is not positive")
            family.append(MuLabel(label, log_ratio_recipe(lam, alpha),
                                  detect_relation(lam, alpha, base)))
    return ReductionProblem(tau, family, A, alpha, M,
                            w_name="n-m" if stage == "gap" else "n")
