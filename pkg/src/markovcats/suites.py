"""Seeded randomized verification suites.

Instance ``k`` of a suite draws from ``default_rng([seed, k])``, so results
depend only on the seed and the instance count; shards only split the
index range between workers.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import projective as P
from .cringplus import CRING, PolyRing, ZT, degree_bound
from .finstoch import (
    FINSTOCH,
    FinSet,
    StochMatrix,
    points,
    random_distribution,
    random_function,
    random_kernel,
    size,
)
from .kernel.core import CheckReport, MarkovCategory, Obj
from .kernel.predicates import (
    check_causality_triple,
    check_comonoid_laws,
    check_discard_natural,
    check_multiplicativity,
    is_deterministic,
)
from .setmulti import SETMULTI, random_multimap
from .vietoris import VIETORIS, all_spaces, random_closed_map, space


@dataclass
class SuiteResult:
    suite: str
    cases: list[CheckReport]
    seed: int
    config: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)


def run_sharded(fn: Callable[[np.random.Generator, int], dict], count: int, seed: int,
                shards: int = 1, parallel: bool = False) -> list[dict]:
    """Evaluate ``fn(rng_k, k)`` for ``k < count``; output order is ``k`` order."""
    shards = max(1, min(shards, count)) if count else 1
    chunks = [c.tolist() for c in np.array_split(np.arange(count), shards)]

    def work(ks):
        return [fn(np.random.default_rng([seed, k]), k) for k in ks]

    if parallel and shards > 1:
        with ThreadPoolExecutor(max_workers=shards) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    return [r for part in parts for r in part]


def _implication_report(name: str, records: list[dict], extra=None) -> CheckReport:
    """Fold per-instance ``{hypothesis, conclusion, passed, witness}`` records."""
    bad = [r for r in records if not r["passed"]]
    hyp = sum(1 for r in records if r.get("hypothesis"))
    concl = sum(1 for r in records if r.get("hypothesis") and r.get("conclusion"))
    implication = any("hypothesis" in r for r in records)
    info = {"instances": len(records), "violations": len(bad)}
    if implication:
        info.update(hypothesis_true=hyp, conclusion_true=concl)
    info.update(extra or {})
    detail = (f"{len(records)} instances, {hyp} with hypothesis true, {len(bad)} violations" if implication
              else f"{len(records)} instances, {len(bad)} violations")
    if bad:
        return CheckReport(name, False, detail, witness=bad[0].get("witness") or {"index": bad[0]["k"]},
                           extra=info)
    return CheckReport(name, True, detail, extra=info)


def _obj(n: int) -> Obj:
    return Obj((FinSet.range(n),))


def _sparse_kernel(dom: Obj, cod: Obj, rng: np.random.Generator) -> StochMatrix:
    """Random kernel whose rows live on random nonempty supports."""
    n = size(cod)
    d = int(rng.integers(1, 7))
    num = np.zeros((size(dom), n), dtype=np.int64)
    for i in range(size(dom)):
        k = int(rng.integers(1, n + 1))
        supp = rng.choice(n, size=k, replace=False)
        parts = random_distribution(k, d, rng)
        num[i, supp] = parts
    return StochMatrix(dom, cod, num, d)


# axioms

def _structural_reports(cat: MarkovCategory, objs: list[Obj], label: str) -> CheckReport:
    checked = 0
    for X in objs:
        r = check_comonoid_laws(cat, X)
        checked += 1
        if not r.passed:
            return CheckReport(f"{label} structural", False, r.detail, witness=r.witness)
        for f in (cat.copy(X), cat.identity(X), cat.discard(X)):
            if not is_deterministic(f) or not check_discard_natural(f):
                return CheckReport(f"{label} structural", False, f"structural map on {X!r}",
                                   witness={"morphism": f})
    for X, Y in itertools.product(objs, repeat=2):
        r = check_multiplicativity(cat, X, Y)
        checked += 1
        if not r.passed:
            return CheckReport(f"{label} structural", False, r.detail, witness=r.witness)
        if not is_deterministic(cat.swap(X, Y)):
            return CheckReport(f"{label} structural", False, "swap not deterministic",
                               witness={"X": X, "Y": Y})
    return CheckReport(f"{label} structural", True,
                       f"comonoid laws on {len(objs)} objects, multiplicativity on {len(objs) ** 2} pairs",
                       extra={"objects": len(objs), "checks": checked})


_RANDOM_CATS = {
    "finstoch": (FINSTOCH, lambda X, Y, rng: random_kernel(X, Y, rng, int(rng.integers(1, 7))),
                 lambda n, rng: _obj(n)),
    "setmulti": (SETMULTI, random_multimap, lambda n, rng: _obj(n)),
    "vietoris": (VIETORIS, random_closed_map,
                 lambda n, rng: space(all_spaces(n)[int(rng.integers(len(all_spaces(n))))])),
}


def _random_law_instance(rng: np.random.Generator, k: int) -> dict:
    name = ("finstoch", "setmulti", "vietoris")[k % 3]
    cat, rand, mkobj = _RANDOM_CATS[name]
    X, Y, Z, W = (mkobj(int(rng.integers(1, 4)), rng) for _ in range(4))
    f, g, h = rand(X, Y, rng), rand(Y, Z, rng), rand(Z, W, rng)
    f2 = rand(W, X, rng)
    c = cat.compose
    checks = {
        "associativity": c(c(f, g), h) == c(f, c(g, h)),
        "left unit": c(cat.identity(X), f) == f,
        "right unit": c(f, cat.identity(Y)) == f,
        "interchange": c(cat.tensor(f, h), cat.tensor(g, cat.identity(W)))
        == cat.tensor(c(f, g), h),
        "discard natural": check_discard_natural(f) and check_discard_natural(cat.tensor(g, f2)),
        "swap natural": c(cat.tensor(f, g), cat.swap(Y, Z)) == c(cat.swap(X, Y), cat.tensor(g, f)),
    }
    det = [cat.function(A, B, _random_fn(A, B, rng, constant=name == "vietoris"))
           for A, B in ((X, Y), (Y, Z))]
    checks["deterministic closure"] = (all(is_deterministic(d) for d in det)
                                       and is_deterministic(c(*det))
                                       and is_deterministic(cat.tensor(*det)))
    failed = [law for law, ok in checks.items() if not ok]
    return {"k": k, "passed": not failed, "category": name,
            "witness": {"k": k, "category": name, "laws": failed} if failed else None}


def _random_fn(A: Obj, B: Obj, rng: np.random.Generator, constant: bool = False):
    """Random function on single-atom carriers; constant ones are continuous everywhere."""
    src = [p[0] for p in points(A)]
    dst = [p[0] for p in points(B)]
    if constant:
        y = dst[int(rng.integers(len(dst)))]
        return lambda x: y
    table = {x: dst[int(rng.integers(len(dst)))] for x in src}
    return table.__getitem__


def axiom_suite(seed: int = 0, count: int = 500, shards: int = 1, parallel: bool = False) -> SuiteResult:
    small = [_obj(n) for n in (1, 2, 3)]
    cases = [
        _structural_reports(FINSTOCH, small, "finstoch"),
        _structural_reports(SETMULTI, small, "setmulti"),
        _structural_reports(VIETORIS, [space(s) for n in (1, 2, 3) for s in all_spaces(n)], "vietoris"),
    ]
    with degree_bound(6):
        ZXY = Obj((PolyRing(("x", "y")),))
        cases.append(_structural_reports(CRING, [ZT, ZXY], "cring"))
    records = run_sharded(_random_law_instance, count, seed, shards, parallel)
    per_cat = {n: sum(1 for r in records if r["category"] == n) for n in _RANDOM_CATS}
    cases.append(_implication_report("random morphism laws", records, {"per_category": per_cat}))
    return SuiteResult("axioms", cases, seed, {"count": count, "shards": shards})


# determinism lemma

def _fiber_kernel(A: Obj, X: Obj, s: StochMatrix, rng) -> StochMatrix:
    """Kernel whose rows each live inside one fiber of the function ``s``."""
    targets = s.num.argmax(axis=1)
    values = sorted(set(targets.tolist()))
    d = int(rng.integers(1, 7))
    num = np.zeros((size(A), size(X)), dtype=np.int64)
    for i in range(size(A)):
        t = values[int(rng.integers(len(values)))]
        fiber = np.flatnonzero(targets == t)
        num[i, fiber] = random_distribution(len(fiber), d, rng)
    return StochMatrix(A, X, num, d)


def _determinism_instance(rng, k) -> dict:
    A, X, T = (_obj(int(rng.integers(1, 5))) for _ in range(3))
    s = random_function(X, T, rng)
    mode = k % 3
    if mode == 0:
        p = _sparse_kernel(A, X, rng)
    elif mode == 1:
        p = _fiber_kernel(A, X, s, rng)
    else:
        p = random_function(A, X, rng)
    r = P.check_determinism_lemma(p, s)
    return {"k": k, "passed": r.passed, "hypothesis": r.hypothesis, "conclusion": r.conclusion,
            "witness": r.witness}


def determinism_suite(seed: int = 0, count: int = 1000, shards: int = 1, parallel: bool = False) -> SuiteResult:
    records = run_sharded(_determinism_instance, count, seed, shards, parallel)
    return SuiteResult("determinism-lemma", [_implication_report("determinism lemma", records)], seed,
                       {"count": count, "shards": shards})


# finite Kolmogorov law

def _kolmogorov_instance(rng, k) -> dict:
    A = _obj(int(rng.integers(1, 3)))
    n = int(rng.integers(1, 5))
    sizes = [int(rng.integers(2, 4)) for _ in range(n)]
    det = [bool(rng.integers(2)) for _ in range(n)]
    qs = [random_function(A, _obj(m), rng) if dt else random_kernel(A, _obj(m), rng, int(rng.integers(1, 7)))
          for m, dt in zip(sizes, det)]
    p = FINSTOCH.compose(FINSTOCH.copy_n(A, n), FINSTOCH.tensor_all(qs))
    mode = k % 3
    pool = [i for i in range(n) if det[i]] if mode == 1 else list(range(n))
    if mode == 2 or not pool:
        G = (int(rng.integers(n)),)
    else:
        r = int(rng.integers(1, len(pool) + 1))
        G = tuple(sorted(rng.choice(pool, size=r, replace=False).tolist()))
    XG = Obj(tuple(p.cod.factors[i] for i in G))
    T = _obj(int(rng.integers(1, 4)))
    sG = random_function(XG, T, rng) if mode != 2 else FINSTOCH.compose(
        FINSTOCH.discard(XG), random_function(Obj(), T, rng))
    r = P.check_kolmogorov_finite(p, P.StatisticFamily(G, sG))
    return {"k": k, "passed": r.passed, "hypothesis": r.hypothesis, "conclusion": r.conclusion,
            "witness": r.witness}


def kolmogorov_suite(seed: int = 0, count: int = 1000, shards: int = 1, parallel: bool = False) -> SuiteResult:
    records = run_sharded(_kolmogorov_instance, count, seed, shards, parallel)
    return SuiteResult("kolmogorov-finite", [_implication_report("kolmogorov zero-one (finite)", records)],
                       seed, {"count": count, "shards": shards})


# infinite independence lemma

def random_independent_family(rng, iid: bool | None = None) -> P.CompatibleFamily:
    A = _obj(int(rng.integers(1, 3)))
    X = _obj(2)
    if iid is None:
        iid = bool(rng.integers(2))
    if iid:
        return P.iid_family(random_kernel(A, X, rng, int(rng.integers(1, 7))), P.naturals())
    base = [int(x) for x in rng.integers(0, 2 ** 31, size=2)]
    d = int(rng.integers(2, 7))
    return P.independent_family(lambda i: random_kernel(A, X, np.random.default_rng(base + [i]), d),
                                P.naturals())


def _infindep_instance(depth):
    def run(rng, k):
        fam = random_independent_family(rng)
        i = int(rng.integers(depth))
        r = P.check_infindep_lemma(fam, i, depth)
        ok = r.passed and r.hypothesis is True
        return {"k": k, "passed": ok, "hypothesis": r.hypothesis, "conclusion": r.conclusion,
                "witness": r.witness or ({"k": k, "detail": r.detail} if not ok else None)}
    return run


def infindep_suite(seed: int = 0, count: int = 200, depth: int = 5, shards: int = 1,
                   parallel: bool = False) -> SuiteResult:
    records = run_sharded(_infindep_instance(depth), count, seed, shards, parallel)
    return SuiteResult("infinite-independence", [_implication_report(
        "infinite independence lemma", records, {"depth": depth})], seed,
        {"count": count, "depth": depth, "shards": shards})


# Hewitt-Savage machinery

def check_exchangeability(fam: P.CompatibleFamily, window: int = 6) -> CheckReport:
    """``injection_action(fam, σ, F) = assign(F)`` for every permutation of the
    first ``window`` labels and every ``F`` inside the window."""
    labels = fam.window(window)
    perms = 0
    seen: set = set()
    for images in itertools.permutations(labels):
        sigma = P.permutation(dict(zip(labels, images)))
        perms += 1
        for F in P.subsets(labels):
            key = (F, tuple(sigma(i) for i in F))
            if key in seen:
                continue
            seen.add(key)
            if P.injection_action(fam, sigma, F) != fam.assign(F):
                return CheckReport("exchangeability", False, f"fails for {sigma.description} on {list(F)}",
                                   witness={"sigma": dict(zip(labels, images)), "F": list(F)})
    return CheckReport("exchangeability", True,
                       f"{perms} permutations × {2 ** len(labels)} subsets "
                       f"({len(seen)} distinct restrictions) on window {list(labels)}",
                       extra={"permutations": perms, "restrictions": len(seen)})


_SPLIT_PAIRS = [((2, 0), (2, 1)), ((2, 1), (2, 0)), ((3, 0), (3, 1)), ((3, 2), (3, 0)), ((1, 0), (1, 8))]


def _splitting_instance(depth):
    def run(rng, k):
        fam = random_independent_family(rng, iid=True)
        (a1, b1), (a2, b2) = _SPLIT_PAIRS[k % len(_SPLIT_PAIRS)]
        t1, t2 = P.affine(a1, b1), P.affine(a2, b2)
        if rng.integers(2):
            labels = list(range(4 * depth + 8))
            pi = P.permutation(dict(zip(labels, rng.permutation(labels).tolist())))
            t1, t2 = pi.after(t1), pi.after(t2)
        window = list(range(min(depth, 4)))
        F1 = [i for i in window if rng.integers(2)]
        F2 = [i for i in window if rng.integers(2)]
        r = P.check_hs_splitting(fam, t1, t2, F1, F2)
        ok = r.passed and r.hypothesis is True
        return {"k": k, "passed": ok, "hypothesis": r.hypothesis, "conclusion": r.conclusion,
                "witness": r.witness or ({"k": k} if not ok else None)}
    return run


def hewitt_savage_suite(seed: int = 0, count: int = 200, depth: int = 5, shards: int = 1,
                        parallel: bool = False, window: int = 6) -> SuiteResult:
    rng = np.random.default_rng([seed, 1 << 20])
    fams = [P.iid_family(random_kernel(_obj(1), _obj(2), rng), P.naturals()),
            P.iid_family(random_kernel(_obj(2), _obj(2), rng), P.naturals())]
    cases = [check_exchangeability(f, window) for f in fams]
    records = run_sharded(_splitting_instance(depth), count, seed, shards, parallel)
    cases.append(_implication_report("hewitt-savage splitting", records, {"depth": depth}))
    return SuiteResult("hewitt-savage", cases, seed, {"count": count, "depth": depth, "window": window,
                                                      "shards": shards})


# a.s.-equality lemma

def _aseq_instance(rng, k) -> dict:
    A, X, Y = (_obj(int(rng.integers(1, 5))) for _ in range(3))
    p = _sparse_kernel(A, X, rng)
    f = random_function(X, Y, rng)
    supp = set(np.flatnonzero(p.num.sum(axis=0)).tolist())
    mode = k % 4
    num = f.num.astype(np.int64) * 6
    if mode == 0:
        for x in range(size(X)):
            if x not in supp:
                num[x] = random_distribution(size(Y), 6, rng)
        g = StochMatrix(X, Y, num, 6)
    elif mode == 1:
        g = random_kernel(X, Y, rng)
    elif mode == 2:
        g = f
    else:
        x = int(rng.choice(sorted(supp)))
        num[x] = random_distribution(size(Y), 6, rng)
        g = StochMatrix(X, Y, num, 6)
    r = P.check_aseq_lemma(p, f, g)
    return {"k": k, "passed": r.passed, "hypothesis": r.hypothesis, "conclusion": r.conclusion,
            "witness": r.witness}


def aseq_suite(seed: int = 0, count: int = 1000, shards: int = 1, parallel: bool = False) -> SuiteResult:
    records = run_sharded(_aseq_instance, count, seed, shards, parallel)
    return SuiteResult("aseq", [_implication_report("a.s.-equality lemma", records)], seed,
                       {"count": count, "shards": shards})


# causality in FinStoch

def _causality_instance(rng, k) -> dict:
    A, X, Y, Z = (_obj(int(rng.integers(1, 4))) for _ in range(4))
    f, g = _sparse_kernel(A, X, rng), _sparse_kernel(X, Y, rng)
    h1 = _sparse_kernel(Y, Z, rng)
    mode = k % 3
    if mode == 0:
        h2 = _sparse_kernel(Y, Z, rng)
    elif mode == 1:
        reach = set(np.flatnonzero(FINSTOCH.compose(f, g).num.sum(axis=0)).tolist())
        num = h1.num.astype(np.int64) * 6
        for y in range(size(Y)):
            if y not in reach:
                num[y] = np.array(random_distribution(size(Z), 6 * h1.den, rng), dtype=np.int64)
        h2 = StochMatrix(Y, Z, num, 6 * h1.den)
    else:
        h2 = h1
    r = check_causality_triple(f, g, h1, h2)
    return {"k": k, "passed": r.passed, "hypothesis": r.hypothesis, "conclusion": r.conclusion,
            "witness": r.witness}


def causality_suite(seed: int = 0, count: int = 10_000, shards: int = 1, parallel: bool = False) -> SuiteResult:
    records = run_sharded(_causality_instance, count, seed, shards, parallel)
    return SuiteResult("finstoch-causality", [_implication_report("finstoch causality", records)], seed,
                       {"count": count, "shards": shards})


SUITES = {
    "axioms": axiom_suite,
    "determinism": determinism_suite,
    "kolmogorov": kolmogorov_suite,
    "infindep": infindep_suite,
    "hewitt-savage": hewitt_savage_suite,
    "aseq": aseq_suite,
    "causality": causality_suite,
}
