"""Exact arithmetic in a real quadratic field Q(sqrt D) and logarithmic heights.

Elements are stored as ``(a + b*sqrt(D)) / c`` in lowest terms.  Only
``D = 2`` is needed for balancing numbers but nothing here depends on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Union

from .certified import CertifiedReal, enclose_log, enclose_sqrt

Number = Union[int, Fraction, "QuadraticNumber"]


def _squarefree_part(n: int) -> tuple[int, int]:
    """Write ``n = f**2 * D`` with ``D`` squarefree; return ``(f, D)``."""
    if n <= 0:
        raise ValueError("expected a positive integer")
    f, d, p = 1, n, 2
    while p * p <= d:
        while d % (p * p) == 0:
            d //= p * p
            f *= p
        p += 1
    return f, d


def _sign_of(x: int, y: int, D: int) -> int:
    """Exact sign of ``x + y*sqrt(D)``."""
    if x >= 0 and y >= 0:
        return 0 if x == 0 and y == 0 else 1
    if x <= 0 and y <= 0:
        return -1
    # opposite signs: compare x**2 with D*y**2
    diff = x * x - D * y * y
    if diff == 0:
        return 0  # only possible when D is a square
    return (1 if x > 0 else -1) if diff > 0 else (1 if y > 0 else -1)


class QuadraticNumber:
    """An element ``(a + b*sqrt(D)) / c`` of Q(sqrt D), ``c > 0``, ``gcd(a, b, c) = 1``."""

    __slots__ = ("a", "b", "c", "D")

    def __init__(self, a: int, b: int = 0, c: int = 1, D: int = 2):
        if c == 0:
            raise ZeroDivisionError("zero denominator")
        if D < 2 or isqrt(D) ** 2 == D:
            raise ValueError("D must be a positive non-square")
        if c < 0:
            a, b, c = -a, -b, -c
        g = gcd(gcd(a, b), c)
        self.a, self.b, self.c, self.D = a // g, b // g, c // g, D

    @classmethod
    def from_rational(cls, x, D: int = 2) -> "QuadraticNumber":
        x = Fraction(x)
        return cls(x.numerator, 0, x.denominator, D)

    @classmethod
    def sqrt(cls, D: int = 2) -> "QuadraticNumber":
        return cls(0, 1, 1, D)

    # -- coercion ------------------------------------------------------------
    def _lift(self, other) -> "QuadraticNumber":
        if isinstance(other, QuadraticNumber):
            if other.D != self.D:
                raise ValueError("elements of different quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticNumber.from_rational(other, self.D)
        raise TypeError(f"cannot combine QuadraticNumber with {type(other).__name__}")

    # -- structure -------------------------------------------------------------
    @property
    def rational_part(self) -> Fraction:
        return Fraction(self.a, self.c)

    @property
    def irrational_part(self) -> Fraction:
        """Coefficient of sqrt(D)."""
        return Fraction(self.b, self.c)

    def is_rational(self) -> bool:
        return self.b == 0

    def to_fraction(self) -> Fraction:
        if self.b:
            raise ValueError(f"{self} is irrational")
        return Fraction(self.a, self.c)

    def conjugate(self) -> "QuadraticNumber":
        return QuadraticNumber(self.a, -self.b, self.c, self.D)

    def norm(self) -> Fraction:
        return Fraction(self.a * self.a - self.D * self.b * self.b, self.c * self.c)

    def trace(self) -> Fraction:
        return Fraction(2 * self.a, self.c)

    def sign(self) -> int:
        return _sign_of(self.a, self.b, self.D)

    def minimal_polynomial(self) -> tuple[int, ...]:
        """Primitive integer minimal polynomial, leading coefficient positive.

        Returns ``(a0, a1)`` for rationals and ``(a0, a1, a2)`` otherwise,
        coefficients of ``a0*X**k + ...``.
        """
        if self.b == 0:
            return (self.c, -self.a)
        a0, a1, a2 = self.c * self.c, -2 * self.a * self.c, self.a * self.a - self.D * self.b * self.b
        g = gcd(gcd(a0, a1), a2)
        return (a0 // g, a1 // g, a2 // g)

    # -- arithmetic --------------------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        return QuadraticNumber(self.a * o.c + o.a * self.c, self.b * o.c + o.b * self.c,
                               self.c * o.c, self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.c, self.D)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return QuadraticNumber(self.a * o.a + self.D * self.b * o.b,
                               self.a * o.b + self.b * o.a, self.c * o.c, self.D)

    __rmul__ = __mul__

    def inverse(self) -> "QuadraticNumber":
        n = self.a * self.a - self.D * self.b * self.b
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt D)")
        # 1 / ((a + b r)/c) = c (a - b r) / (a^2 - D b^2)
        return QuadraticNumber(self.c * self.a, -self.c * self.b, n, self.D)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = QuadraticNumber(1, 0, 1, self.D)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison ----------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and Fraction(self.a, self.c) == other
        if not isinstance(other, QuadraticNumber):
            return NotImplemented
        return (self.a, self.b, self.c, self.D) == (other.a, other.b, other.c, other.D)

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(self.a, self.c))
        return hash((self.a, self.b, self.c, self.D))

    def compare(self, other) -> int:
        return (self - self._lift(other)).sign()

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    # -- numerics --------------------------------------------------------------------
    def enclose(self, bits: int = 192) -> CertifiedReal:
        """Rational enclosure with relative width about ``2**-bits``.

        When ``a`` and ``b*sqrt(D)`` have opposite signs the value is
        rewritten as ``(a**2 - D b**2) / (c (a - b sqrt D))`` to avoid
        cancellation.
        """
        if self.b == 0:
            return CertifiedReal.exact(Fraction(self.a, self.c))
        r = enclose_sqrt(self.D, bits + 4)
        if self.a == 0 or (self.a > 0) == (self.b > 0):
            return (self.a + self.b * r) / self.c
        n = self.a * self.a - self.D * self.b * self.b
        return CertifiedReal.exact(n) / ((self.a - self.b * r) * self.c)

    def __float__(self):
        return float(self.enclose(64).mid)

    def __repr__(self):
        return f"QuadraticNumber({self.a}, {self.b}, {self.c}, D={self.D})"

    def __str__(self):
        if self.b == 0:
            return str(Fraction(self.a, self.c))
        root = f"sqrt{self.D}"
        if self.a == 0:
            num = f"{self.b}*{root}" if self.b not in (1, -1) else ("-" if self.b < 0 else "") + root
        else:
            num = f"{self.a}{'+' if self.b > 0 else '-'}{abs(self.b)}*{root}"
            if self.c != 1:
                num = f"({num})"
        return num if self.c == 1 else f"{num}/{self.c}"

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b), "c": str(self.c), "D": self.D}

    @classmethod
    def from_json(cls, obj) -> "QuadraticNumber":
        return cls(int(obj["a"]), int(obj["b"]), int(obj["c"]), int(obj["D"]))


def parse_quadratic(text: str, D: int = 2, **symbols: int) -> QuadraticNumber:
    """Parse small exact expressions such as ``4*sqrt2``, ``4*d*sqrt2/9`` or ``2*d/9``.

    Grammar: a product of factors (integers, ``sqrt<D>`` or named integer
    symbols), optionally followed by ``/`` and a product of such factors.
    Decimal literals are rejected.
    """
    src = text.replace(" ", "")
    if not src:
        raise ValueError("empty expression")
    num_txt, _, den_txt = src.partition("/")
    if "/" in den_txt:
        raise ValueError(f"at most one '/' allowed in {text!r}")

    def product(part: str) -> QuadraticNumber:
        value = QuadraticNumber(1, 0, 1, D)
        sign = 1
        if part.startswith("-"):
            sign, part = -1, part[1:]
        for tok in part.split("*"):
            if tok.isdigit():
                value = value * int(tok)
            elif tok.startswith("sqrt") and tok[4:].isdigit():
                if int(tok[4:]) != D:
                    raise ValueError(f"{tok} does not belong to Q(sqrt{D})")
                value = value * QuadraticNumber.sqrt(D)
            elif tok in symbols:
                value = value * symbols[tok]
            else:
                raise ValueError(f"unrecognised factor {tok!r} in {text!r}")
        return value * sign

    result = product(num_txt)
    if den_txt:
        result = result / product(den_txt)
    return result


# ---------------------------------------------------------------------------
# recurrences

def binet_term(spec, n: int) -> int:
    """Evaluate ``U_n = P*alpha**n + conj(P)*beta**n`` exactly and return the integer."""
    if n < 0:
        raise ValueError("index must be non-negative")
    alpha, coeff = spec.alpha, spec.binet_coefficient
    value = coeff * alpha ** n + coeff.conjugate() * alpha.conjugate() ** n
    if value.b != 0 or value.c != 1:
        raise ArithmeticError(f"Binet evaluation of {spec.name}[{n}] did not cancel: {value!r}")
    return value.a


def compare_to_integer_power(x: QuadraticNumber, n: int, y) -> int:
    """Exact sign of ``x**n - y``: -1, 0 or 1."""
    return (x ** n - y).sign()


# ---------------------------------------------------------------------------
# logarithmic heights

@dataclass(frozen=True)
class HeightValue:
    """A height (in nats), exact or an upper estimate.

    ``per_symbol`` carries coefficients of symbolic exponents: the bound
    reads ``value + sum(coef * |symbol|)``.
    """
    value: CertifiedReal
    kind: str = "exact"
    per_symbol: dict = field(default_factory=dict)

    def __add__(self, other: "HeightValue") -> "HeightValue":
        merged = dict(self.per_symbol)
        for sym, coef in other.per_symbol.items():
            merged[sym] = merged[sym] + coef if sym in merged else coef
        kind = "exact" if self.kind == other.kind == "exact" else "estimate"
        return HeightValue(self.value + other.value, kind, merged)

    def scaled(self, k: int) -> "HeightValue":
        k = abs(k)
        return HeightValue(self.value * k, self.kind,
                           {s: c * k for s, c in self.per_symbol.items()})


def height_exact(x, bits: int = 192, log=enclose_log) -> HeightValue:
    """Absolute logarithmic height from the primitive minimal polynomial.

    ``log(value, bits)`` supplies logarithm enclosures; revalidation passes
    one built from stored constants.
    """
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        if x == 0:
            return HeightValue(CertifiedReal.exact(0))
        return HeightValue(log(max(abs(x.numerator), x.denominator), bits))
    if x.is_rational():
        return height_exact(x.to_fraction(), bits, log)
    a0 = x.minimal_polynomial()[0]
    total = log(a0, bits)
    for conj in (x, x.conjugate()):
        mag = conj if conj.sign() > 0 else -conj
        if mag.compare(1) > 0:
            total = total + log(mag, bits)
    return HeightValue(total / 2)


# expression trees for the triangle-inequality estimates

@dataclass(frozen=True)
class Leaf:
    value: Number


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Div:
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: Union[int, str]   # a str is a symbolic integer exponent


def height_estimate(expr, bits: int = 192, log=enclose_log) -> HeightValue:
    """Upper bound for the height of an expression tree.

    Uses h(x +- y) <= h(x) + h(y) + log 2, h(x y^(+-1)) <= h(x) + h(y) and
    h(x^k) = |k| h(x); leaves are measured exactly.
    """
    if isinstance(expr, Leaf):
        h = height_exact(expr.value, bits, log)
        return HeightValue(h.value, "estimate")
    if isinstance(expr, (Add, Sub)):
        total = height_estimate(expr.left, bits, log) + height_estimate(expr.right, bits, log)
        return HeightValue(total.value + log(2, bits), "estimate", total.per_symbol)
    if isinstance(expr, (Mul, Div)):
        total = height_estimate(expr.left, bits, log) + height_estimate(expr.right, bits, log)
        return HeightValue(total.value, "estimate", total.per_symbol)
    if isinstance(expr, Pow):
        inner = height_estimate(expr.base, bits, log)
        if isinstance(expr.exponent, int):
            return inner.scaled(expr.exponent)
        if inner.per_symbol:
            raise ValueError("nested symbolic exponents are not supported")
        return HeightValue(CertifiedReal.exact(0), "estimate", {expr.exponent: inner.value})
    raise TypeError(f"unknown height expression node {expr!r}")


def evaluate(expr, **symbols: int):
    """Exact value of an expression tree (symbols must be bound)."""
    if isinstance(expr, Leaf):
        return expr.value
    if isinstance(expr, Pow):
        k = expr.exponent if isinstance(expr.exponent, int) else symbols[expr.exponent]
        base = evaluate(expr.base, **symbols)
        if isinstance(base, QuadraticNumber):
            return base ** k
        return Fraction(base) ** k
    left, right = evaluate(expr.left, **symbols), evaluate(expr.right, **symbols)
    if isinstance(left, QuadraticNumber) or isinstance(right, QuadraticNumber):
        q = left if isinstance(left, QuadraticNumber) else right
        left, right = q._lift(left), q._lift(right)
    else:
        left, right = Fraction(left), Fraction(right)
    if isinstance(expr, Add):
        return left + right
    if isinstance(expr, Sub):
        return left - right
    if isinstance(expr, Mul):
        return left * right
    return left / right


def factor_tree(x: QuadraticNumber):
    """Split ``r*sqrt(D)`` into ``Mul(Leaf(r), Leaf(sqrt D))``; other values stay leaves."""
    if x.a == 0 and x.b != 0:
        return Mul(Leaf(x.irrational_part), Leaf(QuadraticNumber.sqrt(x.D)))
    return Leaf(x.to_fraction() if x.is_rational() else x)
