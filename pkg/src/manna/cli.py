"""Command-line front end.

Results go to stdout as JSON (or to ``--out``, with a one-line summary on
stdout instead). Errors print a JSON object on stderr and a short human
message on stdout. Exit codes: 0 success, 2 no alpha-MMS allocation exists,
1 any error.
"""
import argparse
import json
import sys
from fractions import Fraction

from . import oracle
from .core import (SolverParams, agent_values, allocation_to_dict, check_tau_condition,
                   format_rational, instance_to_dict, parse_allocation, parse_instance,
                   satisfies_alpha_mms, to_rational)
from .errors import MannaError, TauConditionError
from .generators import gen_nonexistence, gen_partition_reduction, gen_random
from .identical import approx_mms
from .mixed import NoAlphaMms, solve_alpha_mms_po
from .search import opt_alpha_mms_po

EXIT_OK, EXIT_ERROR, EXIT_NONE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rational(text):
    try:
        return to_rational(text)
    except (MannaError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_instance(path):
    return parse_instance(_read(path))


def _dump(doc):
    return json.dumps(doc, sort_keys=True) + "\n"


def _emit(args, doc, summary):
    text = _dump(doc)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(summary)
    else:
        sys.stdout.write(text)


def _q(x):
    return format_rational(Fraction(x))


def _require_tau(inst, tau):
    bad = [i for i, ok in enumerate(check_tau_condition(inst, tau)) if not ok]
    if bad:
        raise TauConditionError(bad)


# Subcommands ---------------------------------------------------------------

def cmd_solve(args):
    inst = _load_instance(args.instance)
    params = SolverParams(alpha=args.alpha, epsilon=args.epsilon, gamma=args.gamma,
                          tau=args.tau, big_budget=args.big_budget)
    result = solve_alpha_mms_po(inst, params, workers=args.threads)
    if isinstance(result, NoAlphaMms):
        doc = {"error": "no_alpha_mms", "alpha": _q(result.alpha),
               "partitions_tried": result.partitions_tried,
               "message": f"no alpha-MMS allocation exists for alpha={_q(result.alpha)}"}
        sys.stderr.write(_dump(doc))
        print(doc["message"])
        return EXIT_NONE
    doc = allocation_to_dict(inst, result)
    _emit(args, doc, f"allocation written to {args.out}")
    return EXIT_OK


def cmd_mms(args):
    inst = _load_instance(args.instance)
    if args.tau is not None:
        _require_tau(inst, args.tau)
    if args.agent is not None and not 0 <= args.agent < inst.n:
        raise MannaError(f"agent {args.agent} out of range")
    agents = range(inst.n) if args.agent is None else [args.agent]
    values = {str(i): _q(approx_mms(inst.values[i], inst.n, args.epsilon, args.big_budget)[0])
              for i in agents}
    _emit(args, {"epsilon": _q(args.epsilon), "mms": values}, f"MMS values written to {args.out}")
    return EXIT_OK


def cmd_opt(args):
    inst = _load_instance(args.instance)
    alpha, alloc = opt_alpha_mms_po(inst, args.epsilon, args.gamma, args.delta, tau=args.tau,
                                    big_budget=args.big_budget, workers=args.threads)
    doc = {"alpha": _q(alpha), **allocation_to_dict(inst, alloc)}
    _emit(args, doc, f"alpha={_q(alpha)}; allocation written to {args.out}")
    return EXIT_OK


def cmd_verify(args):
    inst = _load_instance(args.instance)
    alloc = parse_allocation(inst, _read(args.allocation))
    if args.use_oracle:
        mms = oracle.mms_all(inst, args.budget)
        source = "oracle"
    else:
        mms = [approx_mms(inst.values[i], inst.n, args.epsilon)[0] for i in range(inst.n)]
        source = "approx"
    doc = {
        "alpha": _q(args.alpha),
        "alpha_mms": satisfies_alpha_mms(inst, alloc, mms, args.alpha),
        "mms": [_q(x) for x in mms],
        "mms_source": source,
        "values": [_q(x) for x in agent_values(inst, alloc)],
    }
    if args.gamma is not None:
        if not args.use_oracle:
            raise MannaError("checking gamma-PO needs --use-oracle")
        dominator = oracle.find_gamma_dominator(inst, alloc, args.gamma, args.budget)
        doc["gamma"] = _q(args.gamma)
        doc["gamma_po"] = dominator is None
        doc["dominator"] = None if dominator is None else allocation_to_dict(inst, dominator)
    _emit(args, doc, f"report written to {args.out}")
    return EXIT_OK


def cmd_oracle(args):
    inst = _load_instance(args.instance)
    if args.query == "mms":
        doc = {"mms": [_q(x) for x in oracle.mms_all(inst, args.budget)]}
    elif args.query == "alpha-star":
        mms = oracle.mms_all(inst, args.budget)
        alpha, witness = oracle.alpha_star_witness(inst, mms, args.budget)
        doc = {"alpha_star": _q(alpha), "mms": [_q(x) for x in mms],
               "witness": allocation_to_dict(inst, witness)}
    else:
        if args.allocation is None:
            raise MannaError("oracle po needs --allocation")
        alloc = parse_allocation(inst, _read(args.allocation))
        dominator = oracle.find_gamma_dominator(inst, alloc, args.gamma, args.budget)
        doc = {"gamma": _q(args.gamma), "gamma_po": dominator is None,
               "dominator": None if dominator is None else allocation_to_dict(inst, dominator)}
    _emit(args, doc, f"oracle result written to {args.out}")
    return EXIT_OK


def cmd_gen(args):
    if args.kind == "nonexistence":
        inst = gen_nonexistence()
    elif args.kind == "partition":
        try:
            weights = [int(w) for w in args.weights.split(",")]
        except ValueError:
            raise MannaError(f"weights must be comma-separated integers: {args.weights!r}")
        inst = gen_partition_reduction(weights, args.variant, n=args.n, tau=args.tau)
    else:
        inst = gen_random(args.n, args.m, args.lo, args.hi, args.tau, args.seed)
    _emit(args, instance_to_dict(inst), f"instance written to {args.out}")
    return EXIT_OK


# Parser --------------------------------------------------------------------

def build_parser():
    parser = _Parser(prog="manna", description="MMS + Pareto-optimal allocation of mixed manna")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    budget = oracle.default_budget()

    def add_out(p):
        p.add_argument("--out", help="write the JSON result here")

    p = sub.add_parser("solve", help="find an (alpha - eps)-MMS, gamma-PO allocation")
    p.add_argument("instance")
    p.add_argument("--alpha", type=_rational, required=True)
    p.add_argument("--epsilon", type=_rational, default=Fraction(1, 10))
    p.add_argument("--gamma", type=_rational, default=Fraction(1, 10))
    p.add_argument("--tau", type=_rational, default=Fraction(1, 4))
    p.add_argument("--big-budget", type=int, default=budget)
    p.add_argument("--threads", type=int, default=1)
    add_out(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("mms", help="approximate MMS values")
    p.add_argument("instance")
    p.add_argument("--epsilon", type=_rational, default=Fraction(1, 10))
    p.add_argument("--agent", type=int)
    p.add_argument("--tau", type=_rational, help="check the tau-condition first")
    p.add_argument("--big-budget", type=int, default=budget)
    add_out(p)
    p.set_defaults(func=cmd_mms)

    p = sub.add_parser("opt", help="binary search for the best alpha")
    p.add_argument("instance")
    p.add_argument("--epsilon", type=_rational, default=Fraction(1, 10))
    p.add_argument("--gamma", type=_rational, default=Fraction(1, 10))
    p.add_argument("--delta", type=_rational, default=Fraction(1, 1024))
    p.add_argument("--tau", type=_rational, default=Fraction(1, 4))
    p.add_argument("--big-budget", type=int, default=budget)
    p.add_argument("--threads", type=int, default=1)
    add_out(p)
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("verify", help="check an allocation")
    p.add_argument("instance")
    p.add_argument("allocation")
    p.add_argument("--alpha", type=_rational, default=Fraction(1))
    p.add_argument("--gamma", type=_rational)
    p.add_argument("--epsilon", type=_rational, default=Fraction(1, 100),
                   help="accuracy of approximate MMS values without --use-oracle")
    p.add_argument("--use-oracle", action="store_true")
    p.add_argument("--budget", type=int, default=budget)
    add_out(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force reference answers")
    p.add_argument("query", choices=["mms", "alpha-star", "po"])
    p.add_argument("instance")
    p.add_argument("--allocation", help="allocation file for 'po'")
    p.add_argument("--gamma", type=_rational, default=Fraction(0))
    p.add_argument("--budget", type=int, default=budget)
    add_out(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="generate instances")
    gens = p.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    g = gens.add_parser("nonexistence")
    add_out(g)
    g = gens.add_parser("partition")
    g.add_argument("--weights", required=True, help="comma-separated nonnegative integers")
    g.add_argument("--variant", choices=["two_agent", "tau"], default="two_agent")
    g.add_argument("--n", type=int)
    g.add_argument("--tau", type=_rational)
    add_out(g)
    g = gens.add_parser("random")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--lo", type=int, default=-20)
    g.add_argument("--hi", type=int, default=20)
    g.add_argument("--tau", type=_rational, default=Fraction(1, 4))
    g.add_argument("--seed", type=int, default=0)
    add_out(g)
    p.set_defaults(func=cmd_gen)
    return parser


def _error_doc(exc):
    doc = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("field", "agents", "required", "budget", "condition", "agent"):
        if hasattr(exc, attr):
            doc[attr] = getattr(exc, attr)
    return doc


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        doc = {"error": "UsageError", "message": str(exc)}
    except (MannaError, ValueError, OSError) as exc:
        doc = _error_doc(exc)
    sys.stderr.write(_dump(doc))
    print(f"error: {doc['message']}")
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
