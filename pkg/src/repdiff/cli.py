"""Command-line entry point: ``repdiff <subcommand> ...``.

Exit status: 0 on success or a proven verdict, 1 on not-proven / failed
checks, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .certified import (PrecisionExhausted, PrecisionPolicy, ceil_sig,
                        format_enclosure, to_decimal)
from .config import ConfigError, load_config
from .matveev import (HypothesisError, LinearFormProblem, chain_gap_bound,
                      matveev_coefficient)
from .pipeline import emit_certificate, revalidate, run_proof
from .quadratic import (Div, Leaf, factor_tree, height_estimate, height_exact)
from .recurrence import exhaustive_search, sequence_from_name
from .reduction import (ContinuedFractionExpansion, ReductionFailed,
                        build_lambda_inequality, log_ratio_recipe, reduce)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _exact(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not an exact number: {text!r}") from None


def cmd_search(args, policy, out):
    seq = sequence_from_name(args.sequence)
    sols = exhaustive_search(seq, args.n_max, args.k_min, m_min=args.m_min)
    for s in sols:
        out.write(f"n={s.n} m={s.m} d={s.d} k={s.k}\n")
    out.write(f"{len(sols)} solutions\n")
    return EXIT_OK


def cmd_heights(args, policy, out):
    cfg = load_config(args.config)
    bits = policy.initial_bits
    alpha = cfg.sequence.alpha
    out.write(f"h({alpha}) = {format_enclosure(height_exact(alpha, bits).value)}\n")
    out.write(f"h({cfg.base}) = {format_enclosure(height_exact(cfg.base, bits).value)}\n")
    for d in cfg.digits:
        lam = cfg.lambda3_value(d)
        exact = height_exact(lam, bits).value
        est = height_estimate(Div(factor_tree(cfg.binet_divisor * d), Leaf(Fraction(cfg.base - 1))), bits).value
        out.write(f"d={d}: lambda = {lam}  h = {format_enclosure(exact)}  "
                  f"estimate = {format_enclosure(est)} < {to_decimal(ceil_sig(est.hi), 2)}\n")
    return EXIT_OK


def cmd_matveev(args, policy, out):
    if args.file:
        data = json.loads(Path(args.file).read_text())
        l, d_L, A = data["l"], data["d_L"], [str(a) for a in data["A"]]
        rhs, power = data.get("rhs"), data.get("log_power", 1)
    elif args.A:
        l, d_L, A = args.l, args.d_L, args.A.split(",")
        rhs, power = args.rhs, args.log_power
    else:
        raise UsageError("matveev needs --A or --file")
    problem = LinearFormProblem(l, d_L, tuple(_exact(a) for a in A))
    C = matveev_coefficient(problem, policy.initial_bits)
    rounded = ceil_sig(C.hi)
    out.write(f"C = {format_enclosure(C)}\n")
    out.write(f"C <= {to_decimal(rounded, 2)}\n")
    if rhs is not None:
        b = chain_gap_bound(rounded, int(rhs), None, log_power=power, bits=policy.initial_bits)
        out.write(f"log {rhs} + C (1 + log n)^{power} < {to_decimal(b.constant, 2)} (1 + log n)^{power}\n")
    return EXIT_OK


def cmd_cf(args, policy, out):
    if args.config:
        alpha = load_config(args.config).sequence.alpha
    else:
        alpha = sequence_from_name("balancing").alpha
    cf = ContinuedFractionExpansion(log_ratio_recipe(args.base, alpha), f"log {args.base} / log alpha", policy)
    if not cf.ensure(args.depth):
        raise UsageError("tau is rational and its expansion ends early")
    for i in range(args.depth + 1):
        p, q = cf.convergents[i]
        out.write(f"{i} a={cf.partial_quotients[i]} p={p} q={q}\n")
    return EXIT_OK


def cmd_reduce(args, policy, out):
    try:
        data = json.loads(Path(args.problem).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read problem file: {exc}") from None
    try:
        seq = sequence_from_name(data["sequence"])
        gaps = data.get("gaps", [])
        if isinstance(gaps, dict):
            gaps = range(gaps["from"], gaps["to"] + 1)
        prob = build_lambda_inequality(data["stage"], seq, rhs=int(data["rhs"]), M=int(data["M"]),
                                       digits=data.get("digits", list(range(1, 10))),
                                       base=data.get("base", 10), gaps=gaps, policy=policy)
    except KeyError as exc:
        raise UsageError(f"problem file: missing field {exc}") from None
    res = reduce(prob, strategy=data.get("strategy", "per_label"), retries=data.get("retries", 10),
                 policy=policy)
    out.write(f"A = {prob.A}, B = alpha, M = {prob.M}, w = {prob.w_name}\n")
    out.write(f"first q > 6M: index {res.first_index}; binding q_{res.q_index} = {res.q_used}\n")
    for lab in res.per_label:
        out.write(f"{lab.label}: {lab.method} q_{lab.q_index} eps={format_enclosure(lab.epsilon)} "
                  f"w<={lab.w_bound}\n")
    out.write(f"min eps = {format_enclosure(res.epsilon_min)}\n")
    out.write(f"{prob.w_name} <= {res.w_bound}\n")
    return EXIT_OK


def cmd_prove(args, policy, out):
    cfg = load_config(args.config)
    cert = run_proof(cfg, policy)
    doc = emit_certificate(cert, args.format)
    if args.output:
        Path(args.output).write_text(doc)
        out.write(f"verdict: {cert.verdict}\ncertificate written to {args.output}\n")
    else:
        out.write(doc)
    return EXIT_OK if cert.verdict == "proven" else EXIT_FAIL


def cmd_verify_paper(args, policy, out):
    from .checkpoints import verify_paper
    results = verify_paper()
    for r in results:
        note = f"  [{r.note}]" if r.note else ""
        out.write(f"{r.status:8s} {r.id}: expected {r.expected}, got {r.got}{note}\n")
    bad = sum(r.status != "PASS" for r in results)
    out.write(f"{len(results) - bad} passed, {bad} mismatched\n")
    return EXIT_OK if bad == 0 else EXIT_FAIL


def cmd_revalidate(args, policy, out):
    try:
        doc = json.loads(Path(args.certificate).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read certificate: {exc}") from None
    errors = revalidate(doc)
    for e in errors:
        out.write(f"FAIL {e}\n")
    out.write("certificate consistent\n" if not errors else f"{len(errors)} problem(s)\n")
    return EXIT_OK if not errors else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="repdiff",
                                     description="Repdigits as differences of recurrence terms.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="exhaustive search for small n")
    p.add_argument("--sequence", default="balancing")
    p.add_argument("--n-max", type=int, default=50)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--m-min", type=int, default=0)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("heights", help="heights of alpha, the base and every lambda")
    p.add_argument("--config", default="balancing")
    p.set_defaults(func=cmd_heights)

    p = sub.add_parser("matveev", help="evaluate the Matveev coefficient")
    p.add_argument("--l", type=int, default=3)
    p.add_argument("--d-L", dest="d_L", type=int, default=2)
    p.add_argument("--A", help="comma-separated exact A_j values, e.g. 1763/1000,4606/1000,62/5")
    p.add_argument("--rhs", type=int, help="fold log(rhs) into the rounded coefficient")
    p.add_argument("--log-power", type=int, default=1)
    p.add_argument("--file", help="JSON file with l, d_L, A and optional rhs, log_power")
    p.set_defaults(func=cmd_matveev)

    p = sub.add_parser("cf", help="convergents of log(base)/log(alpha)")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--base", type=int, default=10)
    p.add_argument("--config", help="take alpha from this config")
    p.set_defaults(func=cmd_cf)

    p = sub.add_parser("reduce", help="run one reduction from a JSON problem file")
    p.add_argument("--problem", required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("prove", help="run the full proof and emit a certificate")
    p.add_argument("--config", required=True, help="built-in name or path to a config file")
    p.add_argument("--format", choices=("text", "structured"), default="structured")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("verify-paper", help="diff both built-in proofs against the published values")
    p.set_defaults(func=cmd_verify_paper)

    p = sub.add_parser("revalidate", help="re-check a structured certificate")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_revalidate)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        policy = PrecisionPolicy.from_env()
        return args.func(args, policy, out)
    except (UsageError, ConfigError, HypothesisError) as exc:
        sys.stderr.write(f"repdiff {args.command}: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        sys.stderr.write(f"repdiff {args.command}: {exc}\n")
        return EXIT_USAGE
    except (ReductionFailed, PrecisionExhausted) as exc:
        sys.stderr.write(f"repdiff {args.command}: {exc}\n")
        return EXIT_FAIL


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
