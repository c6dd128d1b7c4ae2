"""Binary recurrences, repdigits and the small-range exhaustive search."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .quadratic import QuadraticNumber, _squarefree_part, compare_to_integer_power


@dataclass(frozen=True)
class SequenceSpec:
    """``U_{n+1} = coeff_p*U_n - coeff_q*U_{n-1}`` with initial terms ``u0, u1``."""

    coeff_p: int
    coeff_q: int
    u0: int
    u1: int
    name: str = "sequence"

    def __post_init__(self):
        if self.coeff_p ** 2 - 4 * self.coeff_q <= 0:
            raise ValueError("characteristic polynomial must have distinct real roots")
        if self.coeff_p >= 2 and not self.u1 > self.u0 >= 0:
            raise ValueError("expected u1 > u0 >= 0 for an increasing sequence")
        _, D = _squarefree_part(self.coeff_p ** 2 - 4 * self.coeff_q)
        if D == 1:
            raise ValueError("characteristic roots are rational; no quadratic Binet data")

    @cached_property
    def radicand(self) -> int:
        return _squarefree_part(self.coeff_p ** 2 - 4 * self.coeff_q)[1]

    @cached_property
    def alpha(self) -> QuadraticNumber:
        """Dominant root ``(p + sqrt(p**2 - 4q)) / 2``."""
        f, D = _squarefree_part(self.coeff_p ** 2 - 4 * self.coeff_q)
        return QuadraticNumber(self.coeff_p, f, 2, D)

    @cached_property
    def beta(self) -> QuadraticNumber:
        return self.alpha.conjugate()

    @cached_property
    def binet_coefficient(self) -> QuadraticNumber:
        """``P`` with ``U_n = P alpha**n + conj(P) beta**n``."""
        return (self.u1 - self.beta * self.u0) / (self.alpha - self.beta)

    @cached_property
    def binet_divisor(self) -> QuadraticNumber:
        """Normalising divisor, ``4*sqrt2`` for balancing and ``2`` for Lucas-balancing."""
        return self.binet_coefficient.inverse()

    def terms(self, n_max: int) -> list[int]:
        return _terms(self.coeff_p, self.coeff_q, self.u0, self.u1, n_max)


BALANCING = SequenceSpec(6, 1, 0, 1, "balancing")
LUCAS_BALANCING = SequenceSpec(6, 1, 1, 3, "lucas-balancing")
BUILTIN_SEQUENCES = {s.name: s for s in (BALANCING, LUCAS_BALANCING)}
# accept the underscore spelling too
BUILTIN_SEQUENCES["lucas_balancing"] = LUCAS_BALANCING


def _terms(p: int, q: int, u0: int, u1: int, n_max: int) -> list[int]:
    out = [u0, u1]
    while len(out) <= n_max:
        out.append(p * out[-1] - q * out[-2])
    return out[: n_max + 1]


def term(spec: SequenceSpec, n: int) -> int:
    """``U_n`` by exact integer iteration."""
    if n < 0:
        raise ValueError("index must be non-negative")
    prev, cur = spec.u0, spec.u1
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, spec.coeff_p * cur - spec.coeff_q * prev
    return cur


@dataclass(frozen=True)
class Repdigit:
    digit: int
    length: int

    def __post_init__(self):
        if not 1 <= self.digit <= 9:
            raise ValueError(f"digit must be in 1..9, got {self.digit}")
        if self.length < 1:
            raise ValueError(f"length must be >= 1, got {self.length}")

    @property
    def value(self) -> int:
        return repdigit_value(self.digit, self.length)

    @property
    def trivial(self) -> bool:
        return self.length == 1


def repdigit_value(d: int, k: int, base: int = 10) -> int:
    """``d * (base**k - 1) / (base - 1)``."""
    if not 1 <= d < base:
        raise ValueError(f"digit must be in 1..{base - 1}, got {d}")
    if k < 1:
        raise ValueError(f"length must be >= 1, got {k}")
    return d * (base ** k - 1) // (base - 1)


def classify_repdigit(N: int, base: int = 10) -> Optional[tuple[int, int]]:
    """``(d, k)`` if ``N`` is a repdigit in ``base``, else ``None``."""
    if N < 1:
        return None
    d = N % base
    k = 0
    while N:
        if N % base != d:
            return None
        N //= base
        k += 1
    return (d, k) if d else None


@dataclass(frozen=True, order=True)
class SearchSolution:
    n: int
    m: int
    d: int
    k: int

    def as_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "d": self.d, "k": self.k}


def exhaustive_search(spec: SequenceSpec, n_max: int, k_min: int = 2, *,
                      m_min: int = 0, base: int = 10, reverse: bool = False) -> list[SearchSolution]:
    """Every ``U_n - U_m = d*(base**k - 1)/(base - 1)`` with ``m_min <= m < n <= n_max``.

    Differences are classified directly, so no ceiling on ``k`` is needed.
    ``reverse`` only changes the iteration order (for cross-checking); the
    result is always sorted by ``(n, m)``.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if k_min < 1:
        raise ValueError("k_min must be >= 1")
    u = spec.terms(n_max)
    ns = range(n_max, 0, -1) if reverse else range(1, n_max + 1)
    found = []
    for n in ns:
        ms = range(n - 1, m_min - 1, -1) if reverse else range(m_min, n)
        for m in ms:
            hit = classify_repdigit(u[n] - u[m], base)
            if hit and hit[1] >= k_min:
                found.append(SearchSolution(n, m, *hit))
    return sorted(found)


def check_growth_envelope(spec: SequenceSpec, n_max: int) -> bool:
    """Exact check of ``alpha**(n-1) <= B_n < alpha**n`` or ``alpha**n < 2 C_n < alpha**(n+1)``."""
    key = (spec.coeff_p, spec.coeff_q, spec.u0, spec.u1)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    alpha = spec.alpha
    u = spec.terms(n_max)
    if key == (6, 1, 0, 1):
        return all(compare_to_integer_power(alpha, n - 1, u[n]) <= 0
                   and compare_to_integer_power(alpha, n, u[n]) > 0
                   for n in range(1, n_max + 1))
    if key == (6, 1, 1, 3):
        return all(compare_to_integer_power(alpha, n, 2 * u[n]) < 0
                   and compare_to_integer_power(alpha, n + 1, 2 * u[n]) > 0
                   for n in range(1, n_max + 1))
    raise ValueError(f"no growth envelope known for {spec.name!r}")


def sequence_from_name(name: str) -> SequenceSpec:
    try:
        return BUILTIN_SEQUENCES[name]
    except KeyError:
        raise ValueError(f"unknown sequence {name!r}; choose from balancing, lucas-balancing") from None
