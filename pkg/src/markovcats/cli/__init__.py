"""Command-line interface: ``markovcats <subcommand>``.

Exit codes: 0 when every check passes, 1 on a check failure, 2 on usage
or script syntax errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from importlib import resources

from ..kernel.core import CheckReport
from .montecarlo import InvalidConfig, MonteCarloConfig, simulate_hs_negative_control, simulate_kolmogorov_demo
from .report import emit_report
from .runner import run_checks
from .script import ScriptError, emit_script, parse_script

__all__ = [
    "main", "parse_script", "emit_script", "run_checks", "emit_report", "MonteCarloConfig",
    "simulate_kolmogorov_demo", "simulate_hs_negative_control", "bundled_scripts", "bundled_script",
]


def bundled_scripts() -> list[str]:
    files = resources.files(__package__).joinpath("scripts")
    return sorted(p.name[:-3] for p in files.iterdir() if p.name.endswith(".mc"))


def bundled_script(name: str) -> str:
    return resources.files(__package__).joinpath("scripts", f"{name}.mc").read_text(encoding="utf-8")


def _fractions(text: str) -> list[Fraction]:
    try:
        return [Fraction(x.strip()) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of rationals: {text!r}") from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _finish(args, reports: list[CheckReport], suite: str, config: dict | None = None) -> int:
    seed = getattr(args, "seed", None)
    text = emit_report(reports, suite, seed, config)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.json:
        sys.stdout.write(text)
    else:
        for r in reports:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
        ok = sum(r.passed for r in reports)
        print(f"{suite}: {ok}/{len(reports)} passed")
    return 0 if all(r.passed for r in reports) else 1


def _cmd_check(args) -> int:
    if args.list:
        print("\n".join(bundled_scripts()))
        return 0
    from .. import suites
    reports: list[CheckReport] = []
    names = []
    for name in args.suite or []:
        fn = suites.SUITES[name]
        kw = {"seed": args.seed, "shards": args.shards, "parallel": args.parallel}
        if args.count is not None:
            kw["count"] = args.count
        if name in ("infindep", "hewitt-savage"):
            kw["depth"] = args.depth
        reports += fn(**kw).cases
        names.append(name)
    sources = [(p, None) for p in args.scripts] + [(None, b) for b in args.bundled or []]
    if not sources and not args.suite:
        print("nothing to check: give a script, --bundled NAME or --suite NAME", file=sys.stderr)
        return 2
    for path, bundled in sources:
        try:
            text = bundled_script(bundled) if bundled else open(path, encoding="utf-8").read()
        except (OSError, FileNotFoundError) as exc:
            print(f"cannot read {path or bundled}: {exc}", file=sys.stderr)
            return 2
        try:
            script = parse_script(text)
        except ScriptError as exc:
            print(f"{path or bundled}: {exc}", file=sys.stderr)
            return 2
        out, _ = run_checks(script, parallel=args.parallel)
        reports += out
        names.append(bundled or path)
    config = {"shards": args.shards, "depth": args.depth, "count": args.count}
    return _finish(args, reports, "+".join(map(str, names)), config)


def _demo_report(name: str, result, passed: bool, claim: str) -> CheckReport:
    data = result.to_dict()
    detail = f"empirical probability {result.probability:.4f} ({claim})"
    return CheckReport(name, passed, detail, witness=None if passed else data, extra=data)


def _cmd_demo_kolmogorov(args) -> int:
    try:
        cfg = MonteCarloConfig((args.q,), args.theta, args.N, args.samples, args.seed, args.shards,
                               sampler=args.sampler)
    except InvalidConfig as exc:
        print(exc, file=sys.stderr)
        return 2
    res = simulate_kolmogorov_demo(cfg, parallel=args.parallel)
    q, th, p = cfg.biases[0], cfg.theta, res.probability
    if q < th:
        passed, claim = p <= args.band, f"expected ≤ {args.band}"
    elif q > th:
        passed, claim = p >= 1 - args.band, f"expected ≥ {1 - args.band}"
    else:
        passed, claim = True, "q = θ: no zero-one claim"
    return _finish(args, [_demo_report("kolmogorov demo", res, passed, claim)], "demo-kolmogorov",
                   cfg.to_dict())


def _cmd_demo_hs(args) -> int:
    try:
        cfg = MonteCarloConfig(tuple(args.biases), args.theta, args.N, args.samples, args.seed,
                               args.shards, tuple(args.weights or ()), args.sampler)
    except InvalidConfig as exc:
        print(exc, file=sys.stderr)
        return 2
    res = simulate_hs_negative_control(cfg, parallel=args.parallel)
    limit = res.oracle["limit"]
    if limit is None:
        passed, claim = True, "a bias equals θ: no limit claimed"
    else:
        lo, hi = float(Fraction(limit)) - args.band, float(Fraction(limit)) + args.band
        passed = lo <= res.probability <= hi
        claim = f"expected in [{lo:.2f}, {hi:.2f}]"
    return _finish(args, [_demo_report("hewitt-savage negative control", res, passed, claim)],
                   "demo-hewitt-savage", cfg.to_dict())


def _cmd_search(args) -> int:
    if args.instance == "finstoch":
        from ..suites import causality_suite
        res = causality_suite(args.seed, args.budget, args.shards, args.parallel)
        return _finish(args, res.cases, "search-causality", {"instance": "finstoch", "budget": args.budget})
    from ..vietoris import causality_search
    res = causality_search(args.max_points, args.seed, args.budget, args.discrete_only)
    data = res.to_dict()
    if res.found is not None:
        detail = (f"finite counterexample found after {res.examined} quadruples "
                  f"(recorded, not asserted)")
    else:
        detail = f"no counterexample among {res.examined} quadruples (says nothing about existence)"
    report = CheckReport("vietoris causality search", True, detail, extra=data)
    return _finish(args, [report], "search-causality",
                   {"instance": "vietoris", "budget": args.budget, "max_points": args.max_points,
                    "discrete_only": args.discrete_only})


def _cmd_witness(args) -> int:
    from ..setmulti import nonextension_witness
    lo = args.n if args.n is not None else 1
    hi = args.n if args.n is not None else args.max_n
    reports = [nonextension_witness(N)[2] for N in range(lo, hi + 1)]
    return _finish(args, reports, "witness-setmulti", {"range": [lo, hi]})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="markovcats", description="Exact checks in finite Markov categories.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, depth=False):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--shards", type=int, default=1)
        p.add_argument("--parallel", action="store_true", help="run shards or directives on threads")
        p.add_argument("--json", action="store_true", help="print the JSON report to stdout")
        p.add_argument("-o", "--output", help="also write the JSON report to this file")
        if depth:
            p.add_argument("--depth", type=int, default=5, help="window size for family checks")

    p = sub.add_parser("check", help="run check scripts and randomized suites")
    p.add_argument("scripts", nargs="*", help="script files")
    p.add_argument("--bundled", action="append", help="run a bundled script by name")
    p.add_argument("--suite", action="append", choices=sorted(_suite_names()), help="run a randomized suite")
    p.add_argument("--count", type=int, help="instances per randomized suite")
    p.add_argument("--list", action="store_true", help="list bundled scripts")
    common(p, depth=True)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("demo-kolmogorov", help="sampling demo of the Kolmogorov zero-one law")
    p.add_argument("--q", type=_fraction, default=Fraction(1, 2))
    p.add_argument("--theta", type=_fraction, default=Fraction(3, 5))
    p.add_argument("--N", type=int, default=10_000)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--band", type=float, default=0.01)
    p.add_argument("--sampler", choices=["binomial", "flips"], default="binomial")
    common(p)
    p.set_defaults(func=_cmd_demo_kolmogorov)

    p = sub.add_parser("demo-hewitt-savage", help="exchangeable-but-dependent negative control")
    p.add_argument("--biases", type=_fractions, default=[Fraction(3, 10), Fraction(7, 10)])
    p.add_argument("--weights", type=_fractions, default=None)
    p.add_argument("--theta", type=_fraction, default=Fraction(1, 2))
    p.add_argument("--N", type=int, default=10_000)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--band", type=float, default=0.05)
    p.add_argument("--sampler", choices=["binomial", "flips"], default="binomial")
    common(p)
    p.set_defaults(func=_cmd_demo_hs)

    p = sub.add_parser("search-causality", help="random search for causality violations")
    p.add_argument("--instance", choices=["vietoris", "finstoch"], default="vietoris")
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--max-points", type=int, default=3)
    p.add_argument("--discrete-only", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("witness-setmulti", help="distinct subsets with equal proper marginals")
    p.add_argument("--n", type=int, help="a single N")
    p.add_argument("--max-n", type=int, default=8)
    common(p)
    p.set_defaults(func=_cmd_witness)
    return parser


def _suite_names():
    from ..suites import SUITES
    return SUITES.keys()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)
