"""Matveev lower bounds for linear forms in logarithms and the bound chain.

The chain combines the lower bound ``log|Gamma| > -C (1 + log n)**p`` with
upper bounds of shape ``|Gamma| < c / alpha**w`` and then frees ``n`` from the
resulting self-referential inequality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Union

from .certified import (CertifiedReal, ceil_sig, enclose_log, enclose_sqrt,
                        log_of, next_sig)
from .quadratic import QuadraticNumber


class HypothesisError(ValueError):
    """A hypothesis of a borrowed theorem could not be certified."""


@dataclass(frozen=True)
class LinearFormProblem:
    """Data for Matveev's theorem on ``prod gamma_j**b_j - 1``.

    ``A`` holds the coefficients of the ``A_j``; the last ``a_log_power`` of
    them carry an extra ``(1 + log n)`` factor (stage-2 bounds).
    """
    l: int
    d_L: int
    A: tuple
    D: Union[str, int] = "n"
    a_log_power: int = 0
    gamma_meta: tuple = ()

    def __post_init__(self):
        if len(self.A) != self.l:
            raise ValueError(f"expected {self.l} A_j values, got {len(self.A)}")
        for j, a in enumerate(self.A, 1):
            if not CertifiedReal.coerce(a).lo >= Fraction(16, 100):
                raise HypothesisError(f"A_{j} must be >= 0.16")


@dataclass(frozen=True)
class BoundExpression:
    """``gap * log(alpha) < constant * (1 + log n)**log_power``.

    ``raw`` is the certified value before the two-figure inflation,
    ``plus_term`` the folded additive ``log(c)``.
    """
    constant: Fraction
    log_power: int
    plus_term: CertifiedReal
    raw: CertifiedReal = field(default=None)


@dataclass(frozen=True)
class NonvanishingCertificate:
    statement: str
    verdict: bool


def matveev_coefficient(problem: LinearFormProblem, bits: int = 192) -> CertifiedReal:
    """``1.4 * 30**(l+3) * l**4.5 * d_L**2 * (1 + log d_L) * prod A_j``.

    ``log|Gamma| > -C * (1 + log D)`` with ``C`` the returned value.  With
    ``d_L = 2`` the ``(1 + log d_L)`` factor is the ``(1 + log 2)`` used in
    the worked bounds.
    """
    l, d = problem.l, problem.d_L
    c = CertifiedReal.exact(Fraction(14, 10) * 30 ** (l + 3) * l ** 4 * d * d)
    c = c * enclose_sqrt(l, bits)
    c = c * (1 + enclose_log(d, bits))
    for a in problem.A:
        c = c * CertifiedReal.coerce(a)
    return c


def rounded_coefficient(c: CertifiedReal) -> Fraction:
    """Outward two-figure rounding of a coefficient (``9.76e13 -> 9.8e13``)."""
    return ceil_sig(c.hi, 2)


def chain_gap_bound(C, rhs_constant: int, root_log: CertifiedReal, *,
                    log_power: int = 1, bits: int = 192) -> BoundExpression:
    """Fold ``gap*log(alpha) < log(rhs) + C*(1 + log n)**p`` into one constant.

    Since ``(1 + log n) >= 1`` the additive term is absorbed and the sum is
    inflated to the next two-figure value strictly above it, reproducing
    steps like ``log 4 + 9.8e13 < 9.9e13``.
    """
    C = CertifiedReal.coerce(C)
    if C.lo < 0:
        raise ValueError("Matveev coefficient must be non-negative")
    plus = enclose_log(rhs_constant, bits)
    total = C + plus
    constant = Fraction(0) if total.hi == 0 else next_sig(total.hi, 2)
    return BoundExpression(constant, log_power, plus, total)


def lemma2_solve(r: int, H: CertifiedReal, bits: int = 192) -> int:
    """Upper bound for ``L`` from ``L / (log L)**r < H``: ``L < 2**r H (log H)**r``.

    Requires ``H > (4 r**2)**r``; returns the ceiling of the certified upper end.
    """
    H = CertifiedReal.coerce(H)
    if not H.lo > (4 * r * r) ** r:
        raise HypothesisError(f"Lemma hypothesis H > (4r^2)^r = {(4 * r * r) ** r} not certified")
    logH = log_of(H, bits)
    value = (2 ** r) * H * logH ** r
    return ceil(value.hi)


def certify_bound_direct(bound: int, H: CertifiedReal, r: int, bits: int = 192) -> bool:
    """Check ``bound > H (1 + log bound)**r`` so that ``n < H (1 + log n)**r`` forces ``n < bound``.

    ``x / (1 + log x)**r`` is increasing for ``x > e**(r-1)``, so one
    certified comparison at ``bound`` covers every larger ``n``.
    """
    H = CertifiedReal.coerce(H)
    rhs = H * (1 + enclose_log(bound, bits)) ** r
    return bound > 3 ** max(r - 1, 0) and rhs.hi < bound


def linearize_exponential(y_bound: CertifiedReal, *, numerator=None,
                          base: QuadraticNumber | None = None) -> int:
    """Certify ``y < 1/2`` and return the factor 2 in ``|z| < 2y``.

    If ``numerator`` and ``base`` describe ``y = numerator / base**w`` the
    error names the smallest ``w`` for which the hypothesis holds.
    """
    y_bound = CertifiedReal.coerce(y_bound)
    if y_bound.hi < Fraction(1, 2):
        return 2
    hint = ""
    if numerator is not None and base is not None:
        w = 1
        while (base ** w).compare(2 * numerator) <= 0:
            w += 1
        hint = f"; holds from exponent {w} on"
    raise HypothesisError(f"|e^z - 1| < y needs y < 1/2, got y <= {float(y_bound.hi):.6g}{hint}")


def certify_nonvanishing(coefficient: QuadraticNumber, power_base: QuadraticNumber,
                         *, with_gap: bool = False) -> NonvanishingCertificate:
    """Show ``1 - base**-n * 10**k * coefficient != 0``.

    Without ``with_gap``, vanishing would make ``base**(2n)`` rational.  With
    ``with_gap`` the coefficient carries ``1/(1 - base**-(n-m))`` and
    vanishing would give ``base**n - base**m`` equal to a rational or to a
    rational multiple of ``sqrt D``; conjugating then forces
    ``|base**n - base**m| = |conj(base)**n - conj(base)**m|``, impossible once
    ``base - 1 > 2`` and ``|conj(base)| < 1``.
    """
    if coefficient == 0:
        raise ValueError("degenerate coefficient 0")
    if not (coefficient.a == 0 or coefficient.b == 0):
        raise ValueError(f"unsupported coefficient shape {coefficient}; expected r or r*sqrt(D)")
    if power_base.b == 0:
        raise ValueError("power base must be a quadratic irrational")
    # alpha = (a + b sqrt D)/c with a, b > 0 gives every power a positive sqrt(D) part
    irrational_powers = power_base.a > 0 and power_base.b > 0
    shape = "r*sqrt(D)" if coefficient.a == 0 else "r"
    if not with_gap:
        statement = (f"Gamma = 0 gives base^(2n) = 10^(2k) ({coefficient})^2, rational since the "
                     f"coefficient has shape {shape}; but base = {power_base} has positive rational "
                     f"and irrational parts, so every positive power is irrational")
        return NonvanishingCertificate(statement, irrational_powers)
    conj = power_base.conjugate()
    small_conj = conj.compare(1) < 0 and conj.compare(-1) > 0
    spread = (power_base - 1).compare(2) > 0
    statement = (f"Gamma = 0 gives base^n - base^m = 10^k * (coefficient numerator), of shape {shape}; "
                 f"conjugation then equates |base^n - base^m| >= base^m (base - 1) > 2 with "
                 f"|conj^n - conj^m| < 2, a contradiction")
    return NonvanishingCertificate(statement, irrational_powers and small_conj and spread)
