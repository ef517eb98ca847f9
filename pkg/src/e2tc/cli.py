"""Command line entry point: ``e2tc {run,sweep-norm,sweep-dim,bounds,bench}``."""

from __future__ import annotations

import argparse
import json
import sys

from . import bounds
from .errors import ConfigError, PolicyViolation
from .harness import dim_sweep_config, load_config, norm_sweep_config, run_experiment, runtime_probe


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--T", type=int, help="horizon")
    p.add_argument("--runs", type=int, help="seeds per (instance, policy)")
    p.add_argument("--seed", type=int, dest="base_seed", help="base seed")
    p.add_argument("--out", help="output directory for traces.csv, runs.csv, summary.json")
    p.add_argument("--policy", action="append", dest="policies",
                   help='policy, e.g. "e2tc:alpha=3" or "oful_ball:S_bound=25" (repeatable)')
    p.add_argument("--workers", type=int, help="parallel worker processes")
    p.add_argument("--sigma", type=float, help="noise scale")
    p.add_argument("--check-bounds", action="store_true", default=None, dest="check_bounds",
                   help="exit nonzero when a bound check fails")


def _overrides(args) -> dict:
    keys = ("T", "runs", "base_seed", "out", "policies", "workers", "sigma", "check_bounds")
    return {k: getattr(args, k, None) for k in keys}


def _report(result, check: bool) -> int:
    for row in result.summary:
        lo, hi = row["ci95"]
        print(f"{row['instance']:>16}  {row['policy']:>10}  d={row['d']:<3} norm={row['norm']:<9.4g} "
              f"mean={row['mean']:<12.4f} ci95=[{lo:.2f}, {hi:.2f}]")
    for rep in result.bound_reports:
        if rep.get("pass") is None:
            continue
        flag = "PASS" if rep["pass"] else "FAIL"
        print(f"[{flag}] {rep['instance']} {rep['policy']}: ci95_upper={rep['ci95_upper']:.2f} "
              f"<= rhs={rep['regret_rhs']:.2f}")
    if result.config.out:
        print(f"wrote {result.config.out}/traces.csv, runs.csv, summary.json")
    return 0 if (not check or result.all_pass) else 1


def _execute(raw, args) -> int:
    try:
        cfg = load_config(raw, _overrides(args))
        result = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PolicyViolation as exc:
        print(f"experiment aborted: {exc}", file=sys.stderr)
        return 3
    return _report(result, cfg.check_bounds)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="e2tc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment described by a JSON config")
    p.add_argument("config")
    _add_common(p)

    p = sub.add_parser("sweep-norm", help="final regret vs ||theta|| on the unit ball")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--norms", type=float, nargs="+")
    _add_common(p)

    p = sub.add_parser("sweep-dim", help="final regret vs dimension at fixed ||theta||")
    p.add_argument("--dims", type=int, nargs="+")
    p.add_argument("--norm", type=float, default=10.0)
    _add_common(p)

    p = sub.add_parser("bounds", help="evaluate the closed-form bounds")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--norm", type=float, required=True, help="||theta||_A")

    p = sub.add_parser("bench", help="time single episodes and compare kernel backends")
    p.add_argument("--d", type=int, default=100)
    p.add_argument("--T", type=int, default=100_000)
    p.add_argument("--policy", default="e2tc")
    p.add_argument("--compare-backends", action="store_true")

    args = parser.parse_args(argv)
    if args.command == "run":
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        return _execute(raw, args)
    if args.command == "sweep-norm":
        return _execute(norm_sweep_config(d=args.d, T=args.T or 10_000, norms=args.norms), args)
    if args.command == "sweep-dim":
        return _execute(dim_sweep_config(dims=args.dims, norm=args.norm, T=args.T or 10_000), args)
    if args.command == "bounds":
        out = {
            "d": args.d, "sigma": args.sigma, "T": args.T, "norm": args.norm,
            "logbar": bounds.logbar(args.T * args.norm**2 / max(args.sigma**2 * args.d**2, 1e-300)),
            "theorem3_rhs": bounds.theorem3_rhs(args.d, args.sigma, args.T, args.norm),
            "theorem4_rhs": bounds.theorem4_rhs(args.d, args.sigma, args.T, args.norm),
            "warmup_failure_rhs": bounds.lemma3_failure_rhs(args.d, args.sigma, args.T, args.norm),
            "warmup_length_rhs": bounds.lemma3_warmup_rhs(args.d, args.sigma, args.T, args.norm),
            "lower_bound_floor": bounds.lower_bound_floor(args.d, args.sigma, args.T, args.norm),
        }
        print(json.dumps(out, indent=2))
        return 0
    if args.command == "bench":
        from .bench import compare_backends

        print(json.dumps(runtime_probe(args.policy, d=args.d, T=args.T), indent=2))
        if args.compare_backends:
            print(json.dumps(compare_backends(d=args.d, T=args.T), indent=2))
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
