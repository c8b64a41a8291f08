"""Command-line front end: eval, threshold, sweep, verify, reproduce.

Thin wrappers over the library — every number printed or written is the
unmodified result of the corresponding library call.  Exit codes: 0
success, 1 verification/reproduction mismatch, 2 usage error, 3 resource
cap exceeded.  Option precedence: command-line flags, then the --config
JSON file, then built-in defaults; environment variables are ignored.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bell import (InequalityKind, MeasurementPair, hardy_value_mixture,
                   mabk_value_mixture)
from .crosscheck import DEFAULT_SEED, check_lhv_bounds, run_all
from .errors import DegenerateRatioError, DomainError, ResourceLimitError
from .numerics import set_precision_mode
from .reproduce import (default_jobs, plot_records, record_from_threshold,
                        records_to_csv, run_sweep, run_target, write_records)
from .states import excitation_loss, make_pure, particle_loss
from .thresholds import (MABK_W, ansatz_measurement_pair, hardy_family_for_k,
                         optimize_angles, seed_pairs, threshold_excitation,
                         threshold_excitation_fixed, threshold_particle,
                         w_threshold_optimized)

USAGE_EXIT = 2
RESOURCE_EXIT = 3


def _parse_range(text: str):
    """'5' -> [5]; '2..98' -> [2, 3, ..., 98]."""
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        lo, hi = int(lo_s), int(hi_s)
        if hi < lo:
            raise DomainError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return [int(text)]


def _ansatz_pair(kind: InequalityKind, n: int, k: int) -> MeasurementPair:
    if kind is InequalityKind.MABK:
        if k != 1:
            raise DomainError("the MABK angle family is fitted for k=1 only")
        return ansatz_measurement_pair(MABK_W, n)
    family = hardy_family_for_k(k)
    if family is None:
        raise DomainError(f"no fitted Hardy angle family for k={k}; "
                          "use explicit angles or --angles optimize")
    return ansatz_measurement_pair(family, n)


def _lossy_state(n: int, k: int, model, p, m):
    state = make_pure(n, k)
    if model == "excitation":
        if p is None:
            raise DomainError("--model excitation requires --p")
        return excitation_loss(state, p)
    if model == "particle":
        if m is None:
            raise DomainError("--model particle requires --m")
        return particle_loss(state, m)
    if p is not None or m is not None:
        raise DomainError("--p/--m have no effect without "
                          "--model excitation or --model particle")
    return state


def _emit(args, records, default_plot_title: str = "") -> None:
    if args.out:
        write_records(records, args.out, args.format)
        if args.plot:
            plot_records(records, _plot_path(args.out),
                         title=default_plot_title)
    elif args.plot:
        raise DomainError("--plot requires --out")


def _plot_path(out: str) -> str:
    stem = out.rsplit(".", 1)[0] if "." in out.split("/")[-1] else out
    return stem + ".svg"


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_eval(args) -> int:
    kind = InequalityKind(args.inequality)
    state = _lossy_state(args.n, args.k, args.model, args.p, args.m)
    if args.angles == "explicit":
        if args.alpha0 is None or args.alpha1 is None:
            raise DomainError("explicit angles require --alpha0 and --alpha1")
        pair = MeasurementPair(args.alpha0, args.alpha1)
    elif args.angles == "ansatz":
        pair = _ansatz_pair(kind, args.n, args.k)
    else:
        k_seed = min(max(args.k, 1), args.n - 1)  # seed families need 1<=k<n
        pair, _ = optimize_angles(args.n, state, kind,
                                  seed_pairs(args.n, k_seed, kind))
    value_fn = (hardy_value_mixture if kind is InequalityKind.HARDY
                else mabk_value_mixture)
    bv = value_fn(state, pair)
    report = {
        "n": args.n, "k": args.k, "model": args.model or "none",
        "inequality": kind.value, "alpha0": pair.alpha0, "alpha1": pair.alpha1,
        "value": bv.value, "log_scale": bv.log_scale,
        "local_bound": bv.local_bound, "violated": bv.violated,
    }
    print(json.dumps(report))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(json.dumps(report, indent=2) + "\n")
    return 0


def cmd_threshold(args) -> int:
    kind = InequalityKind(args.inequality)
    if args.model == "particle":
        res = threshold_particle(args.n, args.k, kind)
    elif args.k == 1:
        # the one-excitation/vacuum affine ratio is the k=1 method of
        # record (exact in p, no scan); --angles ansatz skips refinement
        res = w_threshold_optimized(args.n, kind,
                                    refine=args.angles != "ansatz")
    elif args.angles == "ansatz":
        res = threshold_excitation_fixed(args.n, args.k, kind,
                                         _ansatz_pair(kind, args.n, args.k))
    else:
        res = threshold_excitation(args.n, args.k, kind)
    rec = record_from_threshold(res)
    print(json.dumps(rec.__dict__))
    _emit(args, [rec])
    return 0


def cmd_sweep(args) -> int:
    kind = InequalityKind(args.inequality)
    records = run_sweep(args.model, kind, _parse_range(args.n),
                        _parse_range(args.k), jobs=args.jobs,
                        timing=args.timing)
    if args.out:
        _emit(args, records, f"{args.model} {kind.value}")
    else:
        if args.plot:
            raise DomainError("--plot requires --out")
        sys.stdout.write(records_to_csv(records))
    return 0


def cmd_verify(args) -> int:
    outcomes = run_all(args.max_n, pairs=args.pairs, seed=args.seed)
    if args.lhv:
        outcomes.append(check_lhv_bounds(min(args.max_n, 4)))
    failed = False
    for c in outcomes:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status}  {c.name}: max deviation {c.max_deviation:.3e} "
              f"(tolerance {c.tolerance:.1e}, {c.cases} cases)"
              + (f" worst at {c.detail}" if c.detail and not c.passed else ""))
        failed = failed or not c.passed
    return 1 if failed else 0


def cmd_reproduce(args) -> int:
    records, checks = run_target(args.target, jobs=args.jobs,
                                 timing=args.timing)
    out = args.out or f"{args.target}.{args.format}"
    write_records(records, out, args.format)
    if args.plot:
        plot_records(records, _plot_path(out), title=args.target)
    failed = False
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status}  {c.label}: observed {c.observed:.6g}, "
              f"anchor {c.expected:.6g}, tolerance {c.tolerance:.6g}")
        failed = failed or not c.passed
    print(f"wrote {len(records)} rows to {out}")
    return 1 if failed else 0


# ----------------------------------------------------------------------
# parser and dispatch
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dickebell",
        description="Bell-violation loss thresholds of symmetric "
                    "Dicke states under excitation and particle loss.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file path")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="output file format (default csv)")
    common.add_argument("--plot", action="store_true", default=None,
                        help="also write an SVG line chart next to --out")
    common.add_argument("--jobs", type=int, default=None,
                        help="worker processes (default: all cores)")
    common.add_argument("--precision", choices=("standard", "extended"),
                        default=None, help="numeric mode (default standard)")
    common.add_argument("--config", help="JSON file with default options")
    common.add_argument("--timing", action="store_true", default=None,
                        help="record wall time per row (breaks byte-for-byte "
                             "determinism of output files)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common],
                       help="evaluate one Bell expression")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--model", choices=("excitation", "particle"))
    p.add_argument("--p", type=float, help="excitation-loss probability")
    p.add_argument("--m", type=int, help="lost-particle count")
    p.add_argument("--inequality", choices=("hardy", "mabk"), required=True)
    p.add_argument("--angles", choices=("explicit", "ansatz", "optimize"),
                   default="explicit")
    p.add_argument("--alpha0", type=float)
    p.add_argument("--alpha1", type=float)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("threshold", parents=[common],
                       help="certified loss threshold for one (n, k)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--model", choices=("excitation", "particle"),
                   default="excitation")
    p.add_argument("--inequality", choices=("hardy", "mabk"), required=True)
    p.add_argument("--angles", choices=("optimize", "ansatz"),
                   default="optimize")
    p.set_defaults(fn=cmd_threshold)

    p = sub.add_parser("sweep", parents=[common],
                       help="threshold sweep over an (n, k) grid")
    p.add_argument("--n", required=True, help="value or range, e.g. 100 or 4..8")
    p.add_argument("--k", required=True, help="value or range, e.g. 2..98")
    p.add_argument("--model", choices=("excitation", "particle"),
                   default="excitation")
    p.add_argument("--inequality", choices=("hardy", "mabk"), required=True)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("verify", parents=[common],
                       help="cross-check closed forms against the dense oracle")
    p.add_argument("--max-n", type=int, default=8, dest="max_n")
    p.add_argument("--pairs", type=int, default=50,
                   help="random angle pairs per (n, k)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--lhv", action="store_true",
                   help="also enumerate deterministic local strategies")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("reproduce", parents=[common],
                       help="regenerate a headline table/figure data set")
    p.add_argument("target", choices=("table1", "fig1", "fig2",
                                      "fig3", "fig4", "fig5"))
    p.set_defaults(fn=cmd_reproduce)
    return parser


#: option defaults applied beneath flags and the config file
_DEFAULTS = {"format": "csv", "plot": False, "precision": "standard",
             "timing": False}


def _apply_config(args) -> None:
    """Fill unset options from the --config JSON file, then defaults."""
    config = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            config = json.load(fh)
        if not isinstance(config, dict):
            raise DomainError("--config must contain a JSON object")
    for key, fallback in (("format", _DEFAULTS["format"]),
                          ("plot", _DEFAULTS["plot"]),
                          ("precision", _DEFAULTS["precision"]),
                          ("timing", _DEFAULTS["timing"]),
                          ("jobs", None), ("out", None)):
        if getattr(args, key, None) is None:
            setattr(args, key, config.get(key, fallback))
    if args.jobs is None:
        args.jobs = default_jobs()
    if args.jobs < 1:
        raise DomainError("--jobs must be at least 1")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        set_precision_mode(args.precision)
        return args.fn(args)
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return RESOURCE_EXIT
    except (DomainError, DegenerateRatioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
