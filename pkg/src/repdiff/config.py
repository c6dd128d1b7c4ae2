"""Problem configurations: an INI-style, exact-only file format.

::

    [sequence]
    name = balancing
    coeff_p = 6
    coeff_q = 1
    u0 = 0
    u1 = 1

    [equation]
    base = 10
    digits = 1..9
    binet_divisor = 4*sqrt2
    lambda3 = 4*d*sqrt2/9
    rhs_stage1 = 4
    rhs_stage2 = 4

    [search]
    small_search_limit = 50
    k_min = 2
    m_min = 0

Decimal literals are rejected for exact quantities.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .quadratic import QuadraticNumber, binet_term, parse_quadratic
from .recurrence import SequenceSpec, term


class ConfigError(ValueError):
    """A configuration field is missing or malformed."""


BALANCING_INI = """\
[sequence]
name = balancing
coeff_p = 6
coeff_q = 1
u0 = 0
u1 = 1

[equation]
base = 10
digits = 1..9
binet_divisor = 4*sqrt2
lambda3 = 4*d*sqrt2/9
rhs_stage1 = 4
rhs_stage2 = 4

[search]
small_search_limit = 50
k_min = 2
m_min = 0
"""

LUCAS_BALANCING_INI = """\
[sequence]
name = lucas-balancing
coeff_p = 6
coeff_q = 1
u0 = 1
u1 = 3

[equation]
base = 10
digits = 1..9
binet_divisor = 2
lambda3 = 2*d/9
rhs_stage1 = 3
rhs_stage2 = 3

[search]
small_search_limit = 50
k_min = 2
m_min = 0
"""

BUILTIN_CONFIGS = {"balancing": BALANCING_INI, "lucas-balancing": LUCAS_BALANCING_INI}


@dataclass(frozen=True)
class ProblemConfig:
    sequence: SequenceSpec
    binet_divisor: QuadraticNumber
    rhs_stage1: int
    rhs_stage2: int
    digits: tuple = tuple(range(1, 10))
    base: int = 10
    small_search_limit: int = 50
    k_min: int = 2
    m_min: int = 0
    lambda3: Optional[str] = None
    strategy: str = "per_label"
    retries: int = 10
    name: str = field(default="")

    def __post_init__(self):
        if not self.name:
            object.__setattr__(self, "name", self.sequence.name)
        if self.binet_divisor != self.sequence.binet_divisor:
            raise ConfigError(f"[equation] binet_divisor: {self.binet_divisor} does not match the "
                              f"recurrence (expected {self.sequence.binet_divisor})")
        for n in range(11):
            if binet_term(self.sequence, n) != term(self.sequence, n):
                raise ConfigError(f"[equation] binet_divisor: Binet round trip fails at n={n}")
        if not self.digits or not all(1 <= d < self.base for d in self.digits):
            raise ConfigError(f"[equation] digits: must lie in 1..{self.base - 1}")
        if self.lambda3 is not None:
            for d in self.digits:
                got = parse_quadratic(self.lambda3, self.sequence.radicand, d=d)
                if got != self.lambda3_value(d):
                    raise ConfigError(f"[equation] lambda3: {self.lambda3} gives {got} at d={d}, "
                                      f"expected {self.lambda3_value(d)}")
        if self.rhs_stage1 < 1 or self.rhs_stage2 < 1:
            raise ConfigError("[equation] rhs_stage1/rhs_stage2: must be positive integers")
        if self.small_search_limit < 1:
            raise ConfigError("[search] small_search_limit: must be >= 1")
        if self.k_min < 1:
            raise ConfigError("[search] k_min: must be >= 1")
        if self.strategy not in ("per_label", "shared"):
            raise ConfigError(f"[reduction] strategy: unknown value {self.strategy!r}")

    def lambda3_value(self, d: int) -> QuadraticNumber:
        """``d * divisor / (base - 1)``, the coefficient in the stage-1 linear form."""
        return self.binet_divisor * d / (self.base - 1)

    def echo(self) -> dict:
        s = self.sequence
        return {
            "name": self.name,
            "sequence": {"name": s.name, "coeff_p": s.coeff_p, "coeff_q": s.coeff_q,
                         "u0": s.u0, "u1": s.u1},
            "binet_divisor": str(self.binet_divisor),
            "base": self.base,
            "digits": list(self.digits),
            "lambda3": self.lambda3,
            "rhs_stage1": self.rhs_stage1,
            "rhs_stage2": self.rhs_stage2,
            "small_search_limit": self.small_search_limit,
            "k_min": self.k_min,
            "m_min": self.m_min,
            "strategy": self.strategy,
            "retries": self.retries,
        }


def _parse_range(text: str, where: str) -> tuple:
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split(".."))
            return tuple(range(lo, hi + 1))
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"{where}: expected 'a..b' or a comma list, got {text!r}") from None


def _int(parser, section, key, default=None) -> int:
    where = f"[{section}] {key}"
    if not parser.has_option(section, key):
        if default is None:
            raise ConfigError(f"{where}: missing")
        return default
    raw = parser.get(section, key).strip()
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{where}: expected an exact integer, got {raw!r}") from None


def parse_config(text: str) -> ProblemConfig:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unreadable config: {exc}") from None
    for section in ("sequence", "equation"):
        if not parser.has_section(section):
            raise ConfigError(f"[{section}]: section missing")
    for section in ("search", "reduction"):
        if not parser.has_section(section):
            parser.add_section(section)
    try:
        seq = SequenceSpec(_int(parser, "sequence", "coeff_p"), _int(parser, "sequence", "coeff_q"),
                           _int(parser, "sequence", "u0"), _int(parser, "sequence", "u1"),
                           parser.get("sequence", "name", fallback="sequence").strip())
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[sequence]: {exc}") from None
    div_raw = parser.get("equation", "binet_divisor", fallback=None)
    if div_raw is None:
        raise ConfigError("[equation] binet_divisor: missing")
    try:
        divisor = parse_quadratic(div_raw, seq.radicand)
    except ValueError as exc:
        raise ConfigError(f"[equation] binet_divisor: {exc}") from None
    digits = _parse_range(parser.get("equation", "digits", fallback="1..9"), "[equation] digits")
    return ProblemConfig(
        sequence=seq,
        binet_divisor=divisor,
        rhs_stage1=_int(parser, "equation", "rhs_stage1"),
        rhs_stage2=_int(parser, "equation", "rhs_stage2"),
        digits=digits,
        base=_int(parser, "equation", "base", 10),
        small_search_limit=_int(parser, "search", "small_search_limit", 50),
        k_min=_int(parser, "search", "k_min", 2),
        m_min=_int(parser, "search", "m_min", 0),
        lambda3=parser.get("equation", "lambda3", fallback=None),
        strategy=parser.get("reduction", "strategy", fallback="per_label").strip(),
        retries=_int(parser, "reduction", "retries", 10),
    )


def load_config(name_or_path: str) -> ProblemConfig:
    """A built-in config name (``balancing``, ``lucas-balancing``) or a file path."""
    key = name_or_path.replace("_", "-")
    if key in BUILTIN_CONFIGS:
        return parse_config(BUILTIN_CONFIGS[key])
    path = Path(name_or_path)
    if not path.is_file():
        raise ConfigError(f"no built-in config or file named {name_or_path!r}")
    return parse_config(path.read_text())
