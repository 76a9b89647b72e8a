"""Command-line entry point: ``aerial-na <command> <config> [options]``.

Monte Carlo defaults to 10^6 trials per estimate with Wilson CI columns;
the deep tails that would need ~10^10 trials go to the analytic
incomplete-gamma oracle whenever the fading/CSI combination has one
(``--estimator auto``).
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from pathlib import Path

from ..availability import ESTIMATOR_METHODS
from ..channel import CSI_MODES
from ..errors import AerialNaError, ConfigError, InfeasibleError
from ..optimizer import POLICIES
from ..traffic import EB_UNIT_MODES
from ..ura import FEASIBILITY_MODES
from . import experiments as ex
from .cache import cached
from .config import TOOL_VERSION, load_scenario
from .svg import emit_svg

_EPILOG = ("Monte Carlo runs default to 1e6 trials (far too few for 1 - 1e-10 tails); "
           "CI columns carry 95%% Wilson half-widths, and deep tails are routed to the "
           "analytic oracle when one exists (--estimator auto). Exit codes: 0 ok, "
           "2 config error, 3 infeasible scenario, 4 numerical failure.")


def _default_cache() -> str:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return os.path.join(base, "aerial-na")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, help="RNG seed (unsigned 64-bit)")
    g.add_argument("--trials", type=int, help="Monte Carlo trials per estimate (default 1e6)")
    g.add_argument("--mode", choices=FEASIBILITY_MODES, help="feasibility mode")
    g.add_argument("--csi", choices=CSI_MODES, help="estimated-channel model")
    g.add_argument("--eb-unit", choices=EB_UNIT_MODES, help="effective-bandwidth units")
    g.add_argument("--estimator", choices=ESTIMATOR_METHODS,
                   help="tail estimator: analytic oracle, Monte Carlo, or auto")
    g.add_argument("--cache-dir", default=None, help=f"result cache (default {_default_cache()})")
    g.add_argument("--no-cache", action="store_true", help="always recompute")
    g.add_argument("-o", "--output", help="write the CSV here instead of stdout")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="aerial-na", description=__doc__.splitlines()[0],
                                     epilog=_EPILOG)
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, epilog=_EPILOG)
        if name != "plot":
            p.add_argument("config", help="scenario file (an empty file gives the defaults)")
        return p

    add("validate", "check a scenario file and print its canonical form")

    p = add("eb", "effective bandwidth of one service class")
    p.add_argument("--class", dest="tag", required=True, choices=("LS", "MS"))
    p.add_argument("--source")
    p.add_argument("--u", type=int)

    p = add("thresholds", "SNR thresholds of every composition")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--xi", type=int, required=True)
    p.add_argument("--source")
    p.add_argument("--u", type=int)

    p = add("na", "NA lower bound of one allocation, factor by factor")
    p.add_argument("--source")
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--xi", type=int, required=True)

    p = add("sweep-u", "NA lower bound against heterogeneity degree U")
    p.add_argument("--source", default="S1,S2,S3,S4", help="comma-separated sources")
    p.add_argument("--policy", choices=POLICIES, default="baseline")
    p.add_argument("--u-max", type=int)

    p = add("compare", "resource-allocation policies against U, with max_U at the target")
    p.add_argument("--source")
    p.add_argument("--eta", type=float)
    p.add_argument("--u-max", type=int)
    p.add_argument("--policies", default=",".join(POLICIES), help="comma-separated subset")

    p = add("optimize", "best (K, xi) of each policy for one profile")
    p.add_argument("--source")
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--policies", default=",".join(POLICIES))

    p = add("oracle", "cross-check the estimator against independent simulations")
    p.add_argument("--which", choices=("tail", "queue", "trajectory"), required=True)
    p.add_argument("--source")
    p.add_argument("--u", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--xi", type=int)

    p = add("plot", "render a sweep or compare CSV as SVG")
    p.add_argument("csv", help="CSV written by sweep-u or compare")
    p.add_argument("--kind", choices=("sweep", "compare"), required=True)
    return parser


def _overrides(args) -> dict:
    pairs = {("estimator", "seed"): args.seed, ("estimator", "trials"): args.trials,
             ("estimator", "mode"): args.mode, ("estimator", "csi"): args.csi,
             ("estimator", "eb_unit"): args.eb_unit, ("estimator", "method"): args.estimator}
    return {k: v for k, v in pairs.items() if v is not None}


def _policies(text: str) -> tuple[str, ...]:
    out = tuple(p.strip() for p in text.split(",") if p.strip())
    bad = [p for p in out if p not in POLICIES]
    if bad or not out:
        raise ConfigError(f"unknown policy {', '.join(bad) or '(none)'}; expected {POLICIES}",
                          key="policies")
    return out


def _command_key(args) -> str:
    skip = {"seed", "trials", "mode", "csi", "eb_unit", "estimator", "cache_dir", "no_cache",
            "output", "verbose", "config"}
    parts = [args.command] + [f"--{k}={v}" for k, v in sorted(vars(args).items())
                              if k not in skip and k != "command" and v is not None]
    return " ".join(parts)


def _emit(text: str, output):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _rows(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


def run(args) -> int:
    if args.command == "plot":
        try:
            text = Path(args.csv).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise ConfigError(f"cannot read {args.csv}: {exc}") from None
        _emit(emit_svg(text, args.kind), args.output)
        return 0

    cfg = load_scenario(args.config).with_overrides(_overrides(args))
    if args.command == "validate":
        _emit(cfg.serialize(), args.output)
        return 0
    src = getattr(args, "source", None) or cfg.source

    if args.command == "eb":
        _emit(ex.eb_table(cfg, args.tag, src, args.u), args.output)
        return 0
    if args.command == "thresholds":
        _emit(ex.thresholds_table(cfg, args.k, args.xi, src, args.u), args.output)
        return 0
    if args.command == "na":
        text, est = ex.na_table(cfg, src, args.u, args.k, args.xi)
        _emit(text, args.output)
        return 0 if est.feasible else InfeasibleError.exit_code

    if args.command == "sweep-u":
        def compute():
            return ex.run_sweep_u(cfg, args.source, args.policy, args.u_max)
    elif args.command == "compare":
        pols = _policies(args.policies)

        def compute():
            return ex.run_policy_comparison(cfg, src, args.eta, args.u_max, pols)
    elif args.command == "optimize":
        pols = _policies(args.policies)

        def compute():
            return ex.optimize_table(cfg, src, args.u, pols)
    else:
        def compute():
            if args.which == "tail":
                return ex.oracle_tail(cfg, src, args.u, args.k, args.xi)
            if args.which == "queue":
                return ex.oracle_queue(cfg)
            return ex.oracle_trajectory(cfg, src, args.u, args.k, args.xi)

    cache_dir = args.cache_dir or _default_cache()
    text, hit = cached(cfg, _command_key(args), compute, cache_dir, not args.no_cache)
    logging.getLogger(__name__).info("%s (%s)", "cache hit" if hit else "computed", cache_dir)
    _emit(text, args.output)
    if args.command == "optimize" and all(not r["K"] for r in _rows(text)):
        return InfeasibleError.exit_code
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except AerialNaError as exc:
        print(f"aerial-na: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"aerial-na: numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
