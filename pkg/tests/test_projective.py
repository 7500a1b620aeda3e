import itertools
import threading
from fractions import Fraction

import numpy as np
import pytest

from markovcats import projective as P
from markovcats.cringplus import CRING, builtin_maps
from markovcats.finstoch import FINSTOCH, FinSet, finset, random_kernel
from markovcats.kernel import MarkovError, NotDeterministic, Obj, displays_ci, is_deterministic
from markovcats.setmulti import SETMULTI
from markovcats.vietoris import VIETORIS, all_spaces, space

B = finset("0", "1")
A2 = finset("a", "b")
I = Obj()
fair = FINSTOCH.state(B, ["1/2", "1/2"])


def biased(p):
    return FINSTOCH.state(B, [1 - Fraction(p), Fraction(p)])


# index sets and injections

def test_index_sets():
    assert P.naturals().first(4) == (0, 1, 2, 3)
    assert P.evens().first(3) == (0, 2, 4) and P.evens().position(6) == 3
    assert P.odds().first(3) == (1, 3, 5)
    u = P.disjoint_union(P.evens(), P.odds())
    assert u.first(5) == (0, 1, 2, 3, 4)
    t = P.disjoint_union(P.naturals(), P.tagged("y", P.naturals()))
    assert t.first(4) == (0, ("y", 0), 1, ("y", 1))
    assert t.order([("y", 1), 2, 0]) == (0, ("y", 1), 2)
    fin = P.finite(["p", "q"])
    assert fin.first(10) == ("p", "q") and "q" in fin and "z" not in fin
    with pytest.raises(P.LabelCollision):
        P.finite(["p", "p"])


def test_injections():
    s = P.transposition(0, 3)
    assert [s(i) for i in range(5)] == [3, 1, 2, 0, 4]
    assert s.finite_permutation and s.moved == {0, 3}
    e = P.affine(2, 0)
    assert e.image([0, 1, 2]) == [0, 2, 4] and not e.finite_permutation
    comp = s.after(e)
    assert comp(1) == 2 and comp(0) == 3
    with pytest.raises(P.NotInjective):
        P.permutation({0: 1, 1: 1})


# iid families and compatibility

def test_iid_family_examples():
    fam = P.iid_family(fair, P.naturals())
    assert fam.assign([1, 2]).rows() == [[Fraction(1, 4)] * 4]
    assert fam.assign([]) == FINSTOCH.discard(I)
    rng = np.random.default_rng(0)
    q = random_kernel(A2, B, rng)
    fam2 = P.iid_family(q, P.naturals())
    assert fam2.assign([]) == FINSTOCH.discard(A2)
    for _ in range(20):
        F = [i for i in range(6) if rng.integers(2)][:4]
        assert displays_ci(fam2.assign(F))


def test_validate_compatibility():
    fam = P.iid_family(biased("1/3"), P.naturals())
    assert P.validate_compatibility(fam, 5).passed
    assert P.validate_compatibility(fam, 0).passed
    bad = P.override_family(fam, {(0, 1): FINSTOCH.state(B @ B, ["1/2", 0, 0, "1/2"])})
    r = P.validate_compatibility(bad, 4)
    assert not r.passed
    assert set(r.witness["F"]) < set(r.witness["F_prime"]) or r.witness["F_prime"] == [0, 1]


def test_memoized_assign_is_thread_safe():
    fam = P.iid_family(biased("2/5"), P.naturals())
    subsets = list(P.subsets(fam.window(5)))
    results = {}

    def work(k):
        results[k] = [fam.assign(F) for F in subsets[k::3]]

    threads = [threading.Thread(target=work, args=(k,)) for k in range(3)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    fresh = P.iid_family(biased("2/5"), P.naturals())
    for k in range(3):
        assert results[k] == [fresh.assign(F) for F in subsets[k::3]]


# products and regrouping

def test_product_of_iid_is_iid():
    q = biased("1/3")
    f1 = P.iid_family(q, P.naturals())
    f2 = P.iid_family(q, P.tagged("y", P.naturals()))
    prod = P.product_family(f1, f2)
    whole = P.iid_family(q, P.disjoint_union(P.naturals(), P.tagged("y", P.naturals())))
    assert P.compare_families(prod, whole, 5).passed
    assert P.validate_compatibility(prod, 5).passed
    for F in P.subsets((0, 1, 2)):
        assert prod.assign(F) == f1.assign(F)


def test_product_with_empty_family():
    f1 = P.iid_family(fair, P.naturals())
    empty = P.marginal_family(FINSTOCH.discard(I), [])
    prod = P.product_family(f1, empty)
    assert P.compare_families(prod, f1, 4).passed


def test_product_label_collision():
    f1 = P.iid_family(fair, P.naturals())
    with pytest.raises(P.LabelCollision):
        P.product_family(f1, P.iid_family(fair, P.evens()))


def test_regroup():
    q1, q2 = biased("1/3"), biased("3/4")
    f1 = P.iid_family(q1, P.naturals())
    f2 = P.iid_family(q2, P.tagged("y", P.naturals()))
    single = P.regroup_family({"x": f1})
    assert P.compare_families(single, f1, 4).passed
    reg = P.regroup_family({"x": f1, "y": f2})
    assert P.compare_families(reg, P.product_family(f1, f2), 4).passed
    for F in P.subsets(reg.window(4)):
        met = reg.groups_met(F)
        assert reg.rho(F, met) == reg.rho(F, ["x", "y"])
    with pytest.raises(P.LabelCollision):
        P.regroup_family({"x": f1, "z": P.iid_family(q1, P.odds())})


def test_comparison_isomorphism():
    q = biased("2/7")
    star = P.iid_family(q, P.finite(["*"]))
    rest = P.iid_family(q, P.naturals())
    extended = P.iid_family(q, P.disjoint_union(P.finite(["*"]), P.naturals()))
    assert P.compare_families(P.product_family(star, rest), extended, 5).passed


# injection action

def test_injection_action_examples():
    fam = P.iid_family(biased("1/3"), P.naturals())
    assert P.injection_action(fam, P.identity_injection(), [0, 2]) == fam.assign([0, 2])
    assert P.injection_action(fam, P.transposition(0, 3), [0, 1]) == fam.assign([0, 1])
    varied = P.independent_family(lambda i: biased("1/4") if i == 0 else fair, P.naturals())
    assert P.injection_action(varied, P.transposition(0, 1), [0]) != varied.assign([0])
    with pytest.raises(P.NotInjective):
        P.injection_action(fam, P.IndexInjection(lambda i: 0), [0, 1])


def test_action_functoriality():
    rng = np.random.default_rng(9)
    fam = P.independent_family(lambda i: biased(Fraction(1, i + 2)), P.naturals())
    maps = [P.transposition(0, 2), P.affine(2, 1), P.permutation({1: 3, 3: 4, 4: 1}), P.affine(3, 0)]
    for s, t in itertools.product(maps, repeat=2):
        F = [i for i in range(4) if rng.integers(2)]
        assert P.injection_action(P.act(fam, s), t, F) == P.injection_action(fam, s.after(t), F)


# lemma checkers

def test_infindep_examples():
    assert P.check_infindep_lemma(P.iid_family(fair, P.naturals()), 1, 4).passed
    varied = P.independent_family(lambda i: biased(Fraction(1, i + 2)), P.naturals())
    r = P.check_infindep_lemma(varied, 2, 5)
    assert r.passed and r.hypothesis
    coin = P.CompatibleFamily(FINSTOCH, I, P.naturals(), lambda i: B,
                              lambda ls: FINSTOCH.compose(fair, FINSTOCH.copy_n(B, len(ls))))
    r = P.check_infindep_lemma(coin, 0, 4)
    assert r.passed and r.hypothesis is False and "not applicable" in r.detail


def test_determinism_lemma_examples():
    X = finset("0", "1")
    s = FINSTOCH.function(X, B, lambda x: "1" if x == "1" else "0")
    r = P.check_determinism_lemma(FINSTOCH.dirac(X, "0"), s)
    assert r.hypothesis and r.conclusion
    r = P.check_determinism_lemma(fair, FINSTOCH.identity(B))
    assert r.hypothesis is False and r.passed
    X2 = B @ B
    uni = FINSTOCH.state(X2, ["1/4"] * 4)
    const = FINSTOCH.compose(FINSTOCH.compose(FINSTOCH.identity(X2), FINSTOCH.discard(X2)),
                             FINSTOCH.dirac(B, "1"))
    r = P.check_determinism_lemma(uni, const)
    assert r.hypothesis and r.conclusion
    with pytest.raises(NotDeterministic):
        P.check_determinism_lemma(fair, FINSTOCH.kernel(B, B, [["1/2", "1/2"], [0, 1]]))


def test_kolmogorov_finite_examples():
    X3 = B @ B @ B
    coins = FINSTOCH.compose(FINSTOCH.copy_n(I, 3), FINSTOCH.tensor_all([fair] * 3))
    const = P.StatisticFamily((0,), FINSTOCH.compose(FINSTOCH.discard(B), FINSTOCH.dirac(B, "0")))
    r = P.check_kolmogorov_finite(coins, const)
    assert r.hypothesis and r.conclusion
    parity = P.StatisticFamily((0, 1, 2), FINSTOCH.function(
        X3, B, lambda x: str(sum(map(int, x)) % 2)))
    r = P.check_kolmogorov_finite(coins, parity)
    assert r.passed and r.hypothesis is False and r.conclusion is False
    assert "F'=[0, 1, 2]" in r.detail
    # parameter selecting one of two product states
    q0 = FINSTOCH.kernel(A2, B, [["1/3", "2/3"], ["3/4", "1/4"]])
    p = FINSTOCH.compose(FINSTOCH.copy_n(A2, 2), FINSTOCH.tensor(q0, q0))
    r = P.check_kolmogorov_finite(p, P.StatisticFamily((1,), FINSTOCH.compose(
        FINSTOCH.discard(B), FINSTOCH.dirac(B, "1"))))
    assert r.hypothesis and r.conclusion


def test_statistic_must_be_deterministic():
    with pytest.raises(NotDeterministic):
        P.StatisticFamily((0,), FINSTOCH.kernel(B, B, [["1/2", "1/2"], [0, 1]]))


def test_hs_splitting_examples():
    fam = P.iid_family(biased("2/5"), P.naturals())
    r = P.check_hs_splitting(fam, P.affine(2, 0), P.affine(2, 1), [0, 1], [1, 2])
    assert r.passed and r.hypothesis and r.conclusion
    r = P.check_hs_splitting(fam, P.affine(2, 0), P.affine(2, 1), [], [0, 3])
    assert r.passed and r.conclusion
    assert P.injection_action(fam, P.affine(2, 1), [0, 3]) == fam.assign([0, 3])
    coin = P.CompatibleFamily(FINSTOCH, I, P.naturals(), lambda i: B,
                              lambda ls: FINSTOCH.compose(fair, FINSTOCH.copy_n(B, len(ls))))
    r = P.check_hs_splitting(coin, P.affine(2, 0), P.affine(2, 1), [0], [0])
    assert r.passed and r.hypothesis is False
    with pytest.raises(P.OverlappingImages):
        P.check_hs_splitting(fam, P.affine(1, 0), P.affine(2, 0), [0, 1], [1])


def test_aseq_examples():
    X = finset("0", "1", "2")
    p = FINSTOCH.state(X, ["1/2", "1/2", 0])
    f = FINSTOCH.function(X, B, lambda x: "1" if x == "1" else "0")
    r = P.check_aseq_lemma(p, f, f)
    assert r.hypothesis and r.conclusion
    g = FINSTOCH.kernel(X, B, [[1, 0], [0, 1], ["1/2", "1/2"]])
    r = P.check_aseq_lemma(p, f, g)
    assert r.hypothesis and r.conclusion
    g2 = FINSTOCH.kernel(X, B, [["1/2", "1/2"], [0, 1], [1, 0]])
    r = P.check_aseq_lemma(p, f, g2)
    assert r.hypothesis is False and r.passed
    with pytest.raises(NotDeterministic):
        P.check_aseq_lemma(p, g, f)
    m = builtin_maps()
    with pytest.raises(MarkovError):
        P.check_aseq_lemma(m["h1"], m["h1"], m["h2"])


def test_marginalization_determinism_everywhere():
    for cat, atoms in ((FINSTOCH, [finset(*map(str, range(n))) for n in (1, 2, 3)]),
                       (SETMULTI, [finset(*map(str, range(n))) for n in (1, 2, 3)]),
                       (VIETORIS, [space(s) for n in (1, 2, 3) for s in all_spaces(n)][::3])):
        for X, Y in itertools.product(atoms, repeat=2):
            for keep in ([], [0], [1], [0, 1]):
                assert P.check_marginalization_determinism(cat, X @ Y, keep).passed


def test_deterministic_family():
    det = P.iid_family(FINSTOCH.kernel(A2, B, [[1, 0], [0, 1]]), P.naturals())
    r = P.check_deterministic_family(det, 4)
    assert r.passed and r.hypothesis
    assert all(is_deterministic(det.assign(F)) for F in P.subsets(det.window(4)))
    r = P.check_deterministic_family(P.iid_family(fair, P.naturals()), 3)
    assert r.passed and r.hypothesis is False
