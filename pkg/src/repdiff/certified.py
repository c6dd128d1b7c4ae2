"""Rational-endpoint interval arithmetic with certified decisions.

Every transcendental scalar used by the proof pipeline (logarithms and
quotients of logarithms) is held as a :class:`CertifiedReal`, a closed
interval ``[lo, hi]`` with :class:`fractions.Fraction` endpoints that is
guaranteed to contain the true value.  Decisions (signs, floors) are only
returned once an enclosure proves them; otherwise precision is escalated
through a caller supplied *recipe* ``bits -> CertifiedReal``.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import floor, ceil, isqrt
from typing import Callable, Union

Rational = Union[int, Fraction]
Recipe = Callable[[int], "CertifiedReal"]

ENV_PRECISION = "REPDIFF_PRECISION"


class PrecisionExhausted(ArithmeticError):
    """Raised when a decision cannot be certified below ``max_bits``."""


@dataclass(frozen=True)
class PrecisionPolicy:
    initial_bits: int = 192
    max_bits: int = 1 << 20
    escalation_factor: int = 2

    def __post_init__(self):
        if self.initial_bits < 64:
            raise ValueError("initial_bits must be >= 64")
        if self.max_bits < self.initial_bits:
            raise ValueError("max_bits must be >= initial_bits")
        if self.escalation_factor < 2:
            raise ValueError("escalation_factor must be >= 2")

    def schedule(self):
        """Yield the precisions tried, ending at ``max_bits``."""
        bits = self.initial_bits
        while bits < self.max_bits:
            yield bits
            bits *= self.escalation_factor
        yield self.max_bits

    @classmethod
    def from_env(cls, environ=None) -> "PrecisionPolicy":
        """Read overrides like ``initial_bits=256,max_bits=65536``."""
        environ = os.environ if environ is None else environ
        raw = environ.get(ENV_PRECISION, "").strip()
        if not raw:
            return cls()
        fields = {}
        for item in raw.split(","):
            key, _, value = item.partition("=")
            key = key.strip()
            if key not in ("initial_bits", "max_bits", "escalation_factor"):
                raise ValueError(f"{ENV_PRECISION}: unknown key {key!r}")
            fields[key] = int(value)
        return cls(**fields)


DEFAULT_POLICY = PrecisionPolicy()


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


class CertifiedReal:
    """A real number known only through an enclosure ``[lo, hi]``."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = _as_fraction(lo)
        hi = lo if hi is None else _as_fraction(hi)
        if lo > hi:
            raise ValueError(f"empty enclosure [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def exact(cls, x) -> "CertifiedReal":
        return cls(x, x)

    @staticmethod
    def coerce(x) -> "CertifiedReal":
        return x if isinstance(x, CertifiedReal) else CertifiedReal.exact(x)

    # -- inspection ---------------------------------------------------------
    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, CertifiedReal):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, float):
            x = Fraction(x)
        return self.lo <= x <= self.hi

    def overlaps(self, other: "CertifiedReal") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def certainly_positive(self) -> bool:
        return self.lo > 0

    def certainly_negative(self) -> bool:
        return self.hi < 0

    def certainly_lt(self, other) -> bool:
        return self.hi < CertifiedReal.coerce(other).lo

    def certainly_le(self, other) -> bool:
        return self.hi <= CertifiedReal.coerce(other).lo

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        return f"CertifiedReal({float(self.lo)!r}, {float(self.hi)!r})"

    def __eq__(self, other):
        if not isinstance(other, CertifiedReal):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    # -- arithmetic (exact endpoints, so outward rounding is automatic) ------
    def __neg__(self):
        return CertifiedReal(-self.hi, -self.lo)

    def __add__(self, other):
        other = CertifiedReal.coerce(other)
        return CertifiedReal(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        other = CertifiedReal.coerce(other)
        return CertifiedReal(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return CertifiedReal.coerce(other) - self

    def __mul__(self, other):
        other = CertifiedReal.coerce(other)
        if other.is_exact():
            c = other.lo
            return CertifiedReal(*sorted((self.lo * c, self.hi * c)))
        products = (self.lo * other.lo, self.lo * other.hi,
                    self.hi * other.lo, self.hi * other.hi)
        return CertifiedReal(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = CertifiedReal.coerce(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("divisor enclosure contains zero")
        return self * CertifiedReal(1 / other.hi, 1 / other.lo)

    def __rtruediv__(self, other):
        return CertifiedReal.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = CertifiedReal.exact(1)
        for _ in range(k):
            result = result * self
        return result

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return CertifiedReal(0, max(-self.lo, self.hi))

    def max_with(self, other) -> "CertifiedReal":
        other = CertifiedReal.coerce(other)
        return CertifiedReal(max(self.lo, other.lo), max(self.hi, other.hi))

    def hull(self, other) -> "CertifiedReal":
        other = CertifiedReal.coerce(other)
        return CertifiedReal(min(self.lo, other.lo), max(self.hi, other.hi))

    def round_out(self, bits: int) -> "CertifiedReal":
        """Outward-round both endpoints to dyadic rationals.

        The granularity is ``2**-bits`` relative to the larger endpoint
        magnitude, which keeps numerators small through long chains.
        """
        mag = max(abs(self.lo), abs(self.hi))
        if mag == 0:
            return self
        exp = mag.numerator.bit_length() - mag.denominator.bit_length()
        shift = bits - exp
        if shift >= 0:
            scale = 1 << shift
            lo = Fraction(floor(self.lo * scale), scale)
            hi = Fraction(ceil(self.hi * scale), scale)
        else:
            scale = 1 << -shift
            lo = Fraction(floor(self.lo / scale) * scale)
            hi = Fraction(ceil(self.hi / scale) * scale)
        return CertifiedReal(lo, hi)


# ---------------------------------------------------------------------------
# logarithms

def _atanh_fixed(p: int, q: int, prec: int) -> tuple[int, int]:
    """Fixed-point ``atanh(p/q)`` for ``0 <= p/q <= 1/3``.

    Returns ``(s, err)`` with ``s / 2**prec <= atanh(p/q) <= (s + err) / 2**prec``.
    Each truncated term is low by less than 3 ulps and the discarded tail is
    below 2 ulps, so ``err = 3 * terms + 2``.
    """
    if p == 0:
        return 0, 0
    t = (p << prec) // q
    p2, q2 = p * p, q * q
    total = 0
    k = 0
    while t:
        total += t // (2 * k + 1)
        t = (t * p2) // q2
        k += 1
    return total, 3 * k + 2


@lru_cache(maxsize=64)
def _ln2_fixed(prec: int) -> tuple[int, int]:
    s, err = _atanh_fixed(1, 3, prec)
    return 2 * s, 2 * err


def _log_rational(x: Fraction, bits: int) -> CertifiedReal:
    a, b = x.numerator, x.denominator
    # x = 2**e * r with 2/3 <= r < 4/3; r = a / (b * 2**e) (or a * 2**-e / b)
    e = a.bit_length() - b.bit_length()
    while True:
        num, den = (a, b << e) if e >= 0 else (a << -e, b)
        if 3 * num < 2 * den:
            e -= 1
        elif 3 * num >= 4 * den:
            e += 1
        else:
            break
    prec = bits + abs(e).bit_length() + 2 * bits.bit_length() + 8
    # ln r = 2 atanh(z), z = (num - den) / (num + den), |z| <= 1/7
    zp, zq = num - den, num + den
    s, err = _atanh_fixed(abs(zp), zq, prec)
    lo_r, hi_r = (2 * s, 2 * (s + err)) if zp >= 0 else (-2 * (s + err), -2 * s)
    l2, l2err = _ln2_fixed(prec)
    if e >= 0:
        lo_2, hi_2 = e * l2, e * (l2 + l2err)
    else:
        lo_2, hi_2 = e * (l2 + l2err), e * l2
    scale = 1 << prec
    return CertifiedReal(Fraction(lo_r + lo_2, scale), Fraction(hi_r + hi_2, scale))


def enclose_log(x, bits: int = 192) -> CertifiedReal:
    """Enclosure of the natural logarithm of ``x``.

    ``x`` may be a positive int/Fraction, a positive :class:`CertifiedReal`,
    or any object exposing ``enclose(bits) -> CertifiedReal`` (such as a
    quadratic irrational).  The width is at most ``2**(1 - bits) * max(1, |ln x|)``
    for exact inputs.
    """
    if hasattr(x, "enclose") and not isinstance(x, CertifiedReal):
        x = x.enclose(bits + 8)
    if isinstance(x, CertifiedReal):
        if x.lo <= 0:
            raise ValueError("logarithm of a non-positive enclosure")
        if x.is_exact():
            return _log_rational(x.lo, bits)
        return CertifiedReal(_log_rational(x.lo, bits).lo, _log_rational(x.hi, bits).hi)
    x = _as_fraction(x)
    if x <= 0:
        raise ValueError(f"logarithm of non-positive value {x}")
    if x == 1:
        return CertifiedReal.exact(0)
    return _log_rational(x, bits)


def enclose_sqrt(n: int, bits: int) -> CertifiedReal:
    """Enclosure of ``sqrt(n)`` for a non-negative integer, width ``2**-bits``."""
    if n < 0:
        raise ValueError("square root of a negative integer")
    s = isqrt(n << (2 * bits))
    if s * s == n << (2 * bits):
        return CertifiedReal.exact(Fraction(s, 1 << bits))
    return CertifiedReal(Fraction(s, 1 << bits), Fraction(s + 1, 1 << bits))


# ---------------------------------------------------------------------------
# certified decisions

class Sign(enum.Enum):
    NEGATIVE = -1
    ZERO_UNPROVABLE = 0
    POSITIVE = 1


def _recipes(x: CertifiedReal | None, refine: Recipe | None, policy: PrecisionPolicy):
    if x is not None:
        yield x
    if refine is not None:
        for bits in policy.schedule():
            yield refine(bits)


def certified_sign(x: CertifiedReal | None = None, refine: Recipe | None = None,
                   policy: PrecisionPolicy = DEFAULT_POLICY) -> Sign:
    """Sign of a real, escalating precision through ``refine`` when needed.

    Returns ``Sign.ZERO_UNPROVABLE`` when no enclosure up to
    ``policy.max_bits`` excludes zero; it never guesses.
    """
    for enc in _recipes(x, refine, policy):
        if enc.lo > 0:
            return Sign.POSITIVE
        if enc.hi < 0:
            return Sign.NEGATIVE
    return Sign.ZERO_UNPROVABLE


def _floor_of(enc: CertifiedReal) -> int | None:
    lo_floor = floor(enc.lo)
    return lo_floor if floor(enc.hi) == lo_floor else None


def certified_floor(x: CertifiedReal | None = None, refine: Recipe | None = None,
                    policy: PrecisionPolicy = DEFAULT_POLICY) -> int:
    """Integer ``n`` with ``n <= x < n + 1`` proven by an enclosure."""
    last = None
    for enc in _recipes(x, refine, policy):
        last = enc
        n = _floor_of(enc)
        if n is not None:
            return n
    raise PrecisionExhausted(f"floor undecided, last enclosure {last!r}")


def _dist(t: Fraction) -> Fraction:
    return abs(t - floor(t + Fraction(1, 2)))


def nearest_integer_distance(x: CertifiedReal) -> CertifiedReal:
    """Enclosure of ``min_z |x - z|`` over integers ``z``; lies in ``[0, 1/2]``."""
    x = CertifiedReal.coerce(x)
    lo, hi = x.lo, x.hi
    if hi - lo >= 1:
        return CertifiedReal(0, Fraction(1, 2))
    ends = (_dist(lo), _dist(hi))
    has_int = floor(hi) > floor(lo) or lo == floor(lo)
    half = Fraction(1, 2)
    has_half = floor(hi - half) > floor(lo - half) or (lo - half) == floor(lo - half)
    return CertifiedReal(Fraction(0) if has_int else min(ends),
                         half if has_half else max(ends))


def log_of(x: CertifiedReal, bits: int) -> CertifiedReal:
    """Logarithm of a positive enclosure (monotone endpoint evaluation)."""
    return enclose_log(CertifiedReal.coerce(x), bits)


# ---------------------------------------------------------------------------
# significant-figure rounding used for displayed constants

def _decimal_exponent(x: Fraction) -> int:
    """``e`` with ``10**e <= x < 10**(e+1)`` for ``x > 0``."""
    e = len(str(x.numerator)) - len(str(x.denominator))
    while Fraction(10) ** e > x:
        e -= 1
    while Fraction(10) ** (e + 1) <= x:
        e += 1
    return e


def ceil_sig(x, digits: int = 2) -> Fraction:
    """Smallest value with ``digits`` significant figures that is ``>= x``."""
    x = _as_fraction(x)
    if x <= 0:
        raise ValueError("ceil_sig expects a positive value")
    unit = Fraction(10) ** (_decimal_exponent(x) - digits + 1)
    return ceil(x / unit) * unit


def next_sig(x, digits: int = 2) -> Fraction:
    """Smallest value with ``digits`` significant figures strictly above ``x``."""
    x = _as_fraction(x)
    if x <= 0:
        raise ValueError("next_sig expects a positive value")
    unit = Fraction(10) ** (_decimal_exponent(x) - digits + 1)
    return (floor(x / unit) + 1) * unit


def to_decimal(x, sig: int, direction: str = "nearest") -> str:
    """Format an exact rational in scientific notation.

    ``direction`` is ``"down"``, ``"up"`` or ``"nearest"``; directed modes
    give strings whose parsed value bounds ``x`` from that side.
    """
    x = _as_fraction(x)
    if x == 0:
        return "0"
    neg = x < 0
    mag = -x if neg else x
    if neg and direction in ("down", "up"):
        direction = "up" if direction == "down" else "down"
    e = _decimal_exponent(mag)
    scaled = mag / Fraction(10) ** (e - sig + 1)
    if direction == "down":
        m = floor(scaled)
    elif direction == "up":
        m = ceil(scaled)
    else:
        m = floor(scaled + Fraction(1, 2))
    if m >= 10 ** sig:
        # only possible when rounding up across a power of ten
        m //= 10
        e += 1
    digits = str(m)
    body = digits[0] + ("." + digits[1:] if len(digits) > 1 else "")
    return f"{'-' if neg else ''}{body}e{e}"


def format_enclosure(x: CertifiedReal, sig: int = 6) -> str:
    """Human-readable ``mid ± halfwidth`` form."""
    half = x.width / 2
    width = to_decimal(half, 2, "up") if half else "0"
    return f"{to_decimal(x.mid, sig)} ± {width}"


def enclosure_to_json(x: CertifiedReal, sig: int = 80) -> dict:
    return {"lo": to_decimal(x.lo, sig, "down"), "hi": to_decimal(x.hi, sig, "up")}


def enclosure_from_json(obj: dict) -> CertifiedReal:
    return CertifiedReal(Fraction(obj["lo"]), Fraction(obj["hi"]))
