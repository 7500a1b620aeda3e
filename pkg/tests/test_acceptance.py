"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py``; the verdicts are
repeated in the terminal summary.
"""

import math
import time
from fractions import Fraction

from markovcats import suites
from markovcats.cli import main
from markovcats.cli.montecarlo import MonteCarloConfig, simulate_hs_negative_control, simulate_kolmogorov_demo
from markovcats.cli.report import emit_report
from markovcats.cringplus import check_noncausality
from markovcats.setmulti import nonextension_witness

SEED = 20240601


def _summary(result):
    return "; ".join(c.detail for c in result.cases)


def test_criterion_01_axioms(acceptance):
    t = time.perf_counter()
    res = suites.axiom_suite(seed=SEED, count=500)
    elapsed = time.perf_counter() - t
    random_case = res.cases[-1]
    ok = res.passed and random_case.extra["instances"] >= 500 and elapsed < 120
    acceptance(1, ok, f"{len(res.cases)} structural/random groups, "
                      f"{random_case.extra['instances']} random instances, {elapsed:.1f}s")
    assert ok, _summary(res)


def test_criterion_02_determinism_lemma(acceptance):
    res = suites.determinism_suite(seed=SEED, count=1000)
    case = res.cases[0]
    ok = res.passed and case.extra["instances"] >= 1000 and case.extra["violations"] == 0
    acceptance(2, ok, case.detail)
    assert ok
    # the suite must actually exercise the implication
    assert case.extra["hypothesis_true"] >= 100


def test_criterion_03_kolmogorov_finite(acceptance):
    res = suites.kolmogorov_suite(seed=SEED, count=1000)
    case = res.cases[0]
    ok = res.passed and case.extra["instances"] >= 1000 and case.extra["violations"] == 0
    acceptance(3, ok, case.detail)
    assert ok
    assert case.extra["hypothesis_true"] >= 100


def test_criterion_04_infinite_independence(acceptance):
    res = suites.infindep_suite(seed=SEED, count=200, depth=5)
    case = res.cases[0]
    ok = res.passed and case.extra["instances"] >= 200 and case.extra["hypothesis_true"] == 200
    acceptance(4, ok, f"depth 5: {case.detail}")
    assert ok


def test_criterion_05_hewitt_savage(acceptance):
    res = suites.hewitt_savage_suite(seed=SEED, count=200, depth=5, window=6)
    exch = [c for c in res.cases if c.name == "exchangeability"]
    split = [c for c in res.cases if c.name == "hewitt-savage splitting"][0]
    ok = (res.passed and all(c.extra["permutations"] == math.factorial(6) for c in exch)
          and split.extra["instances"] >= 200 and split.extra["hypothesis_true"] == split.extra["instances"])
    acceptance(5, ok, f"{len(exch)} families × 720 permutations exchangeable; splitting: {split.detail}")
    assert ok


def test_criterion_06_aseq(acceptance):
    res = suites.aseq_suite(seed=SEED, count=1000)
    case = res.cases[0]
    ok = res.passed and case.extra["instances"] >= 1000
    acceptance(6, ok, case.detail)
    assert ok
    assert 0 < case.extra["hypothesis_true"] < case.extra["instances"]


def test_criterion_07_cring_noncausality(acceptance):
    r = check_noncausality(12)
    ok = (r.passed and r.hypothesis is True and r.conclusion is False
          and r.extra["lhs"] == "t" and r.extra["rhs"] == "1")
    acceptance(7, ok, r.detail)
    assert ok


def test_criterion_08_setmulti_witness(acceptance):
    reports = [nonextension_witness(N)[2] for N in range(1, 9)]
    ok = all(r.passed for r in reports)
    acceptance(8, ok, f"N=1..8: {sum(r.passed for r in reports)}/8 witnesses verified")
    assert ok


def test_criterion_09_finstoch_causality(acceptance):
    res = suites.causality_suite(seed=SEED, count=10_000)
    case = res.cases[0]
    ok = res.passed and case.extra["instances"] >= 10_000 and case.extra["violations"] == 0
    acceptance(9, ok, case.detail)
    assert ok
    assert case.extra["hypothesis_true"] >= 1000


def test_criterion_10_monte_carlo_kolmogorov(acceptance):
    t = time.perf_counter()
    low = simulate_kolmogorov_demo(MonteCarloConfig((Fraction(1, 2),), Fraction(3, 5), 10_000, 10_000, SEED, 4))
    high = simulate_kolmogorov_demo(MonteCarloConfig((Fraction(1, 2),), Fraction(2, 5), 10_000, 10_000, SEED, 4))
    elapsed = time.perf_counter() - t
    ok = low.probability <= 0.01 and high.probability >= 0.99 and elapsed < 60
    acceptance(10, ok, f"θ=3/5: {low.probability:.4f} (Hoeffding {low.oracle['hoeffding']:.1e}); "
                       f"θ=2/5: {high.probability:.4f}; {elapsed:.2f}s")
    assert ok


def test_criterion_11_monte_carlo_hewitt_savage_control(acceptance):
    t = time.perf_counter()
    cfg = MonteCarloConfig((Fraction(3, 10), Fraction(7, 10)), Fraction(1, 2), 10_000, 10_000, SEED, 4,
                           (Fraction(1, 2), Fraction(1, 2)))
    res = simulate_hs_negative_control(cfg)
    elapsed = time.perf_counter() - t
    ok = 0.45 <= res.probability <= 0.55 and elapsed < 60
    acceptance(11, ok, f"mixture {{0.3, 0.7}}: {res.probability:.4f}; {elapsed:.2f}s")
    assert ok


def _twice(fn):
    return fn(), fn()


def test_criterion_12_reproducibility(acceptance, tmp_path):
    mismatches = []
    small = {"axioms": 60, "determinism": 100, "kolmogorov": 100, "infindep": 10, "hewitt-savage": 10,
             "aseq": 100, "causality": 300}
    for name, count in small.items():
        def run(shards=2, parallel=False, name=name, count=count):
            res = suites.SUITES[name](seed=7, count=count, shards=shards, parallel=parallel)
            return emit_report(res.cases, name, 7, res.config)
        a, b = _twice(run)
        if a != b:
            mismatches.append(name)
        if run(parallel=True) != a:
            mismatches.append(f"{name} (parallel)")
    commands = {
        "demo-kolmogorov": ["demo-kolmogorov", "--seed", "3", "--shards", "4"],
        "demo-hewitt-savage": ["demo-hewitt-savage", "--seed", "3", "--shards", "4", "--parallel"],
        "search-causality": ["search-causality", "--budget", "300", "--seed", "3"],
        "witness-setmulti": ["witness-setmulti", "--max-n", "5"],
        "check": ["check", "--bundled", "axioms", "--bundled", "lemmas", "--bundled", "cring_noncausality"],
    }
    for name, argv in commands.items():
        outs = []
        for i in range(2):
            path = tmp_path / f"{name}-{i}.json"
            main(argv + ["-o", str(path)])
            outs.append(path.read_bytes())
        if outs[0] != outs[1]:
            mismatches.append(name)
    ok = not mismatches
    acceptance(12, ok, f"{len(small)} suites (sequential and threaded) and {len(commands)} CLI reports "
                       f"byte-identical" if ok else f"differences in {mismatches}")
    assert ok, mismatches
