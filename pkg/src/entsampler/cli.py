"""Command-line interface.

Subcommands: entropy (evaluate a state file), curve (emit rate-function
CSVs), verify (run a verification suite), calc (security / random-access
calculators).  Exit codes: 0 success, 1 verification failure, 2 usage or
parse error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from math import log2

import numpy as np

from . import entropy, rates, statefile, verify, wsesim
from .errors import EntsamplerError


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _split_state(dens, group_dims, split):
    names = list(group_dims)
    if split is None:
        split = names[0]
    if split not in group_dims:
        raise statefile.StateFileError(
            f"split group {split!r} not in state file (has {names})")
    if names.index(split) != 0:
        raise statefile.StateFileError(
            f"split group {split!r} must be the leading group of the file")
    dim_a = group_dims[split]
    dim_b = dens.matrix.shape[0] // dim_a
    return dens.matrix, dim_a, dim_b


def cmd_entropy(args) -> int:
    try:
        dens, group_dims = statefile.read_state(args.file)
        mat, dim_a, dim_b = _split_state(dens, group_dims, args.split)
    except statefile.StateFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        extra = {}
        if args.measure == "h2":
            value = entropy.h2_cond(mat, dim_a, dim_b).value
        elif args.measure == "hmin":
            res, sol = entropy.hmin_cond(mat, dim_a, dim_b)
            value = res.value
            extra = {"duality_gap": sol.duality_gap, "iterations": sol.iterations}
        else:  # pg-fidelity
            value, _ = entropy.pretty_good_fidelity(mat, dim_a, dim_b)
    except EntsamplerError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    if args.json:
        print(json.dumps({"measure": args.measure, "value": value, **extra}))
    else:
        print(_fmt(value))
    return 0


def cmd_curve(args) -> int:
    if args.function not in rates.CURVE_IDS:
        print(f"error: unknown function {args.function!r} "
              f"(choose from {', '.join(rates.CURVE_IDS)})", file=sys.stderr)
        return 2
    try:
        curve = rates.rate_curve(args.function, d=args.d, grid=args.grid)
        curve.write_csv(args.out)
    except EntsamplerError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {args.out}")
    return 0


SUITES = ("theorem1", "sampling", "uncertainty", "lemmas", "upper", "wse")


def cmd_verify(args) -> int:
    config = {}
    if args.config:
        try:
            with open(args.config) as fh:
                config = json.load(fh)
            if not isinstance(config, dict):
                raise ValueError("config must be a JSON object")
        except (OSError, ValueError) as exc:
            print(f"error: bad config: {exc}", file=sys.stderr)
            return 2
    if args.seed is not None:
        config.setdefault("seed", args.seed)
    try:
        if args.suite == "theorem1":
            config.setdefault("map_kind", "bb84")
            config.setdefault("n", 1)
            config.setdefault("trials", 20)
            report = verify.verify_theorem1(**config)
        elif args.suite == "sampling":
            config.setdefault("n", 3)
            config.setdefault("k", 1)
            config.setdefault("trials", 20)
            report = verify.verify_sampling(**config)
        elif args.suite == "uncertainty":
            config.setdefault("kind", "bb84")
            config.setdefault("n", 1)
            config.setdefault("trials", 20)
            report = verify.verify_uncertainty(**config)
        elif args.suite == "lemmas":
            config.pop("seed", None) if "seed" not in config else None
            report = verify.verify_lemmas(**config)
        elif args.suite == "upper":
            config.pop("seed", None)
            config.setdefault("n", 4)
            report = verify.verify_upper_bounds(**config)
        elif args.suite == "wse":
            config.pop("seed", None)
            config.setdefault("n", 2)
            config.setdefault("q", 1)
            report = wsesim.check_bqsm_bound(**config)
        else:
            print(f"error: unknown suite {args.suite!r}", file=sys.stderr)
            return 2
    except TypeError as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return 2
    except EntsamplerError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    text = report.to_json(args.out)
    if args.out:
        print(f"wrote {args.out}")
    else:
        print(text)
    summary = report.to_dict()["summary"]
    print(f"suite={report.suite} trials={summary['trials']} "
          f"failures={summary['failures']} worst_slack={summary['worst_slack']:.3e}")
    return 0 if report.passed else 1


def cmd_calc(args) -> int:
    try:
        if args.wse_bqsm:
            n, q = args.wse_bqsm
            lam = rates.wse_lambda_bqsm(int(n), float(q))
            print(f"lambda = {_fmt(lam)}")
            print(f"secure: {'yes' if lam > 0 else 'no'}")
        elif args.wse_nsm:
            n, eta = args.wse_nsm
            lam = rates.wse_lambda_nsm(int(n), float(eta))
            print(f"lambda = {_fmt(lam)}")
            print(f"secure: {'yes' if lam > 0 else 'no'}")
        elif args.rac_q:
            n, m, k, d = (int(v) for v in args.rac_q)
            res = rates.rac_quantum_bound(n, m, k, d)
            for w in res.warnings:
                print(f"warning: {w}", file=sys.stderr)
            print(f"fidelity-squared bound = {_fmt(res.value)}")
        elif args.rac_c:
            n, m, k = (int(v) for v in args.rac_c)
            res = rates.rac_classical_bound(n, m, k)
            for w in res.warnings:
                print(f"warning: {w}", file=sys.stderr)
            print(f"guessing-probability bound = {_fmt(res.value)}")
        else:
            print("error: choose one of --wse-bqsm, --wse-nsm, --rac-q, --rac-c",
                  file=sys.stderr)
            return 2
    except EntsamplerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entsampler",
        description="Collision/min-entropy evolution, sampling bounds, "
                    "uncertainty relations and storage-model calculators.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="evaluate an entropy of a state file")
    p.add_argument("file")
    p.add_argument("--measure", choices=("h2", "hmin", "pg-fidelity"),
                   default="h2")
    p.add_argument("--split", default=None,
                   help="name of the leading subsystem group to condition on the rest")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("curve", help="emit a rate-function CSV")
    p.add_argument("--function", required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True, choices=SUITES)
    p.add_argument("--config", default=None, help="JSON file with suite kwargs")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("calc", help="security and random-access calculators")
    p.add_argument("--wse-bqsm", nargs=2, metavar=("N", "Q"), default=None)
    p.add_argument("--wse-nsm", nargs=2, metavar=("N", "ETA"), default=None)
    p.add_argument("--rac-q", nargs=4, metavar=("N", "M", "K", "D"), default=None)
    p.add_argument("--rac-c", nargs=3, metavar=("N", "M", "K"), default=None)
    p.set_defaults(func=cmd_calc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors already
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
