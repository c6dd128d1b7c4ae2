"""Certified proofs that no repdigit is a difference of two balancing or Lucas-balancing numbers."""

from .certified import CertifiedReal, PrecisionPolicy
from .config import ProblemConfig, load_config, parse_config
from .pipeline import emit_certificate, revalidate, run_proof
from .quadratic import QuadraticNumber
from .recurrence import BALANCING, LUCAS_BALANCING, SequenceSpec, exhaustive_search

__all__ = ["BALANCING", "LUCAS_BALANCING", "CertifiedReal", "PrecisionPolicy", "ProblemConfig",
           "QuadraticNumber", "SequenceSpec", "emit_certificate", "exhaustive_search", "load_config",
           "parse_config", "revalidate", "run_proof"]
__version__ = "0.1.0"
