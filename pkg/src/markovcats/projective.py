"""Compatible families of finite marginals as a stand-in for infinite tensor
products, reindexing by injections, and finite-window verifiers for the
zero-one-law machinery.

The limit object ``X_J`` is never built.  A :class:`CompatibleFamily`
gives a morphism ``A → X_F`` for each finite ``F ⊆ J``; every check
quantifies over the finite subsets of a window of the first ``depth``
labels of ``J``.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Iterator, Sequence

from .kernel.core import (
    CheckReport,
    MarkovCategory,
    MarkovError,
    Morphism,
    NotDeterministic,
    Obj,
    TypeMismatch,
    tensor_objects,
)
from .kernel.predicates import (
    as_equal,
    displays_ci,
    displays_ci_partition,
    is_deterministic,
    marginalize,
    permute_factors,
)

Label = Hashable


class LabelCollision(MarkovError):
    pass


class NotInjective(MarkovError):
    pass


class OverlappingImages(MarkovError):
    pass


class IndexSet:
    """A countable, stably enumerated set of labels.

    ``enumerate`` returns a fresh iterator over all labels (possibly
    infinite); ``contains`` decides membership and ``position`` gives the
    enumeration index, which fixes the canonical order of finite subsets.
    """

    def __init__(self, name: str, enumerate: Callable[[], Iterator[Label]],
                 contains: Callable[[Label], bool], position: Callable[[Label], int] | None = None,
                 size: int | None = None):
        self.name = name
        self._enumerate = enumerate
        self.contains = contains
        self._position = position
        self.size = size
        self._cache: list[Label] = []
        self._where: dict[Label, int] = {}
        self._iter: Iterator[Label] | None = None
        self._lock = threading.Lock()

    def _extend_to(self, n: int) -> None:
        with self._lock:
            if self._iter is None:
                self._iter = self._enumerate()
            while len(self._cache) < n:
                try:
                    label = next(self._iter)
                except StopIteration:
                    return
                self._where[label] = len(self._cache)
                self._cache.append(label)

    def first(self, n: int) -> tuple:
        self._extend_to(n)
        return tuple(self._cache[:n])

    def position(self, label: Label, limit: int = 1 << 16) -> int:
        if self._position is not None:
            return self._position(label)
        if label in self._where:
            return self._where[label]
        if not self.contains(label):
            raise KeyError(f"{label!r} not in {self.name}")
        n = max(16, len(self._cache))
        while label not in self._where:
            if n > limit or (self.size is not None and len(self._cache) >= self.size):
                raise KeyError(f"{label!r} not found in the first {len(self._cache)} labels of {self.name}")
            n *= 2
            self._extend_to(n)
        return self._where[label]

    def order(self, labels: Iterable[Label]) -> tuple:
        labels = set(labels)
        for label in labels:
            if not self.contains(label):
                raise KeyError(f"{label!r} not in {self.name}")
        return tuple(sorted(labels, key=self.position))

    def __contains__(self, label):
        return self.contains(label)

    def __repr__(self):
        return f"IndexSet({self.name})"


def naturals() -> IndexSet:
    return IndexSet("ℕ", lambda: itertools.count(0),
                    lambda x: isinstance(x, int) and not isinstance(x, bool) and x >= 0,
                    position=lambda x: x)


def finite(labels: Sequence[Label], name: str | None = None) -> IndexSet:
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        raise LabelCollision("duplicate labels")
    where = {x: i for i, x in enumerate(labels)}
    return IndexSet(name or f"{set(labels)}", lambda: iter(labels), lambda x: x in where,
                    position=lambda x: where[x], size=len(labels))


def arithmetic(a: int, b: int) -> IndexSet:
    """``{a*i + b : i ∈ ℕ}`` with ``a ≥ 1``; labels are naturals."""
    return IndexSet(f"{a}ℕ+{b}", lambda: (a * i + b for i in itertools.count()),
                    lambda x: isinstance(x, int) and x >= b and (x - b) % a == 0,
                    position=lambda x: (x - b) // a)


def evens() -> IndexSet:
    return arithmetic(2, 0)


def odds() -> IndexSet:
    return arithmetic(2, 1)


def tagged(tag: Hashable, base: IndexSet) -> IndexSet:
    """Labels ``(tag, j)`` for ``j`` in ``base``."""
    return IndexSet(
        f"{tag}×{base.name}", lambda: ((tag, j) for j in base._enumerate()),
        lambda x: isinstance(x, tuple) and len(x) == 2 and x[0] == tag and base.contains(x[1]),
        position=lambda x: base.position(x[1]), size=base.size)


def disjoint_union(*parts: IndexSet) -> IndexSet:
    """Union of label-disjoint index sets, enumerated round-robin."""
    def enum():
        iters = [p._enumerate() for p in parts]
        while iters:
            alive = []
            for it in iters:
                try:
                    yield next(it)
                    alive.append(it)
                except StopIteration:
                    pass
            iters = alive

    def contains(x):
        return sum(p.contains(x) for p in parts) == 1

    sizes = [p.size for p in parts]
    total = sum(sizes) if all(s is not None for s in sizes) else None
    return IndexSet("⊔".join(p.name for p in parts) or "∅", enum, contains, size=total)


@dataclass(frozen=True)
class IndexInjection:
    """An injection of an index set into itself.

    ``moved`` is the finite set of labels not fixed, for finite
    permutations; otherwise ``None`` and injectivity is checked per window.
    """

    map: Callable[[Label], Label]
    finite_permutation: bool = False
    moved: frozenset | None = None
    description: str = ""

    def __call__(self, label):
        return self.map(label)

    def image(self, F: Iterable[Label]) -> list:
        return [self.map(i) for i in F]

    def injective_on(self, F: Iterable[Label]) -> bool:
        F = list(F)
        return len(set(self.image(F))) == len(set(F))

    def after(self, other: "IndexInjection") -> "IndexInjection":
        """``self ∘ other``."""
        moved = None
        if self.moved is not None and other.moved is not None:
            moved = frozenset(i for i in self.moved | other.moved if self(other(i)) != i)
        return IndexInjection(lambda i: self.map(other.map(i)),
                              self.finite_permutation and other.finite_permutation,
                              moved, f"({self.description})∘({other.description})")


def identity_injection() -> IndexInjection:
    return IndexInjection(lambda i: i, True, frozenset(), "id")


def permutation(mapping: dict) -> IndexInjection:
    """Finite permutation moving the keys of ``mapping`` and fixing everything else."""
    if set(mapping) != set(mapping.values()):
        raise NotInjective(f"{mapping} does not permute its support")
    moved = frozenset(k for k, v in mapping.items() if k != v)
    return IndexInjection(lambda i: mapping.get(i, i), True, moved, f"perm{dict(mapping)}")


def transposition(a: Label, b: Label) -> IndexInjection:
    return permutation({a: b, b: a})


def affine(a: int, b: int) -> IndexInjection:
    """``i ↦ a*i + b`` on ℕ, e.g. (2,0) onto the evens and (2,1) onto the odds."""
    if a < 1 or b < 0:
        raise NotInjective("need a ≥ 1, b ≥ 0")
    return IndexInjection(lambda i: a * i + b, a == 1 and b == 0,
                          frozenset() if (a, b) == (1, 0) else None, f"i↦{a}i+{b}")


class CompatibleFamily:
    """Finite-marginal data ``F ↦ (A → X_F)`` for an index set.

    ``rule`` receives the canonically ordered labels of ``F`` and returns
    a morphism ``domain → X_F`` with factors in that order.  Results are
    memoized under a lock; the rule must be pure.
    """

    def __init__(self, category: MarkovCategory, domain: Obj, index: IndexSet,
                 factor: Callable[[Label], Obj], rule: Callable[[tuple], Morphism],
                 kind: str = "custom"):
        self.category = category
        self.domain = domain
        self.index = index
        self._factor = factor
        self._rule = rule
        self.kind = kind
        self._memo: dict[tuple, Morphism] = {}
        self._lock = threading.Lock()

    def factor(self, label: Label) -> Obj:
        return self._factor(label)

    def order(self, F: Iterable[Label]) -> tuple:
        return self.index.order(F)

    def obj(self, F: Iterable[Label]) -> Obj:
        return tensor_objects(self.factor(i) for i in self.order(F))

    def assign(self, F: Iterable[Label]) -> Morphism:
        key = self.order(F)
        with self._lock:
            hit = self._memo.get(key)
        if hit is not None:
            return hit
        m = self._rule(key)
        if m.dom != self.domain or m.cod != self.obj(key):
            raise TypeMismatch(f"assign({list(key)}) has type {m.dom!r} → {m.cod!r}")
        with self._lock:
            self._memo.setdefault(key, m)
        return m

    def window(self, depth: int) -> tuple:
        return self.index.first(depth)

    def __repr__(self):
        return f"CompatibleFamily({self.kind} over {self.index.name}, A={self.domain!r})"


def subsets(labels: Sequence) -> Iterator[tuple]:
    for r in range(len(labels) + 1):
        yield from itertools.combinations(labels, r)


def _positions(order: tuple, labels: Iterable) -> list[int]:
    return [order.index(i) for i in labels]


def _select(f: Morphism, positions: Sequence[int]) -> Morphism:
    """Keep the codomain atoms at ``positions`` (distinct), in that order."""
    kept = sorted(positions)
    m = marginalize(f, kept)
    return permute_factors(m, [kept.index(p) for p in positions])


# family constructors

def independent_family(qs: Callable[[Label], Morphism], J: IndexSet, kind: str = "independent") -> CompatibleFamily:
    """``assign(F) = (⊗_{i∈F} q_i) ∘ copy_A``; all ``q_i`` share their domain."""
    first = qs(J.first(1)[0]) if J.first(1) else None
    if first is None:
        raise ValueError("index set is empty")
    cat, A = first.category, first.dom

    def rule(labels):
        if not labels:
            return cat.discard(A)
        return cat.compose(cat.copy_n(A, len(labels)), cat.tensor_all(qs(i) for i in labels))
    return CompatibleFamily(cat, A, J, lambda i: qs(i).cod, rule, kind)


def iid_family(q: Morphism, J: IndexSet) -> CompatibleFamily:
    """The canonical independent family with every factor ``q``."""
    return independent_family(lambda i: q, J, kind="iid")


def marginal_family(p: Morphism, labels: Sequence[Label]) -> CompatibleFamily:
    """Marginals of a joint ``p: A → X_{labels}`` over the finite index set ``labels``."""
    J = finite(labels)
    if len(p.cod) != len(J.first(len(labels))):
        raise TypeMismatch("one codomain atom per label")
    order = J.first(len(labels))
    return CompatibleFamily(p.category, p.dom, J, lambda i: p.cod[order.index(i)],
                            lambda ls: _select(p, _positions(order, ls)), kind="table")


def override_family(fam: CompatibleFamily, table: dict) -> CompatibleFamily:
    """Copy of ``fam`` with ``assign(F)`` replaced for the subsets in ``table``."""
    fixed = {fam.order(F): m for F, m in table.items()}
    return CompatibleFamily(fam.category, fam.domain, fam.index, fam.factor,
                            lambda ls: fixed.get(ls) or fam.assign(ls), kind="table")


def product_family(f1: CompatibleFamily, f2: CompatibleFamily, joint=None,
                   check_depth: int = 32) -> CompatibleFamily:
    """Family over ``J₁ ⊔ J₂``: ``(f1.assign(F∩J₁) ⊗ f2.assign(F∩J₂)) ∘ copy_A``.

    ``joint(m1, m2)`` may replace the default independent pairing.
    """
    if f1.domain != f2.domain or f1.category is not f2.category:
        raise TypeMismatch("both families need the same domain and category")
    for label in f2.index.first(check_depth):
        if f1.index.contains(label):
            raise LabelCollision(f"label {label!r} occurs in both index sets")
    for label in f1.index.first(check_depth):
        if f2.index.contains(label):
            raise LabelCollision(f"label {label!r} occurs in both index sets")
    cat, A = f1.category, f1.domain
    J = disjoint_union(f1.index, f2.index)

    def pair(m1, m2):
        if joint is not None:
            return joint(m1, m2)
        return cat.compose(cat.copy(A), cat.tensor(m1, m2))

    def factor(i):
        return f1.factor(i) if f1.index.contains(i) else f2.factor(i)

    def rule(labels):
        part1 = [i for i in labels if f1.index.contains(i)]
        part2 = [i for i in labels if not f1.index.contains(i)]
        m = pair(f1.assign(part1), f2.assign(part2))
        blocked = tuple(f1.order(part1)) + tuple(f2.order(part2))
        return permute_factors(m, _positions(blocked, labels))
    return CompatibleFamily(cat, A, J, factor, rule, kind="product")


class RegroupedFamily(CompatibleFamily):
    """One family over ``⊔_k J_k`` from finitely many independent families.

    ``rho(F, G)`` is the two-stage marginal: first onto the groups ``G``,
    then onto ``F ∩ J_k`` inside each group; any ``G`` covering the groups
    met by ``F`` gives the same morphism.
    """

    def __init__(self, fams: dict):
        if not fams:
            raise ValueError("need at least one family")
        self.groups = dict(fams)
        first = next(iter(self.groups.values()))
        for k, fam in self.groups.items():
            if fam.domain != first.domain or fam.category is not first.category:
                raise TypeMismatch(f"group {k!r} has a different domain or category")
        keys = list(self.groups)
        for a, b in itertools.combinations(keys, 2):
            for label in self.groups[b].index.first(32):
                if self.groups[a].index.contains(label):
                    raise LabelCollision(f"label {label!r} in groups {a!r} and {b!r}")
        J = disjoint_union(*(self.groups[k].index for k in keys))
        super().__init__(first.category, first.domain, J, self._factor_of,
                         lambda ls: self.rho(ls, self.groups_met(ls)), kind="regroup")

    def _group_of(self, label):
        for k, fam in self.groups.items():
            if fam.index.contains(label):
                return k
        raise KeyError(label)

    def _factor_of(self, label):
        return self.groups[self._group_of(label)].factor(label)

    def groups_met(self, labels) -> list:
        met = {self._group_of(i) for i in labels}
        return [k for k in self.groups if k in met]

    def rho(self, labels, G) -> Morphism:
        cat, A = self.category, self.domain
        labels = self.order(labels)
        G = [k for k in self.groups if k in set(G)]
        if not set(self.groups_met(labels)) <= set(G):
            raise ValueError("G must contain every group that F meets")
        parts = [[i for i in labels if self.groups[k].index.contains(i)] for k in G]
        outer = cat.compose(cat.copy_n(A, len(G)),
                            cat.tensor_all(self.groups[k].assign(p) for k, p in zip(G, parts)))
        blocked = tuple(i for k, p in zip(G, parts) for i in self.groups[k].order(p))
        return permute_factors(outer, _positions(blocked, labels))


def regroup_family(fams: dict) -> RegroupedFamily:
    return RegroupedFamily(fams)


def injection_action(fam: CompatibleFamily, sigma: IndexInjection, F: Iterable[Label]) -> Morphism:
    """``π_F ∘ σ̂ ∘ p``: ``assign(σ(F))`` reindexed along ``σ|_F``."""
    F = fam.order(F)
    if not sigma.injective_on(F):
        raise NotInjective(f"{sigma.description} is not injective on {list(F)}")
    image = sigma.image(F)
    for i, j in zip(F, image):
        if fam.factor(i) != fam.factor(j):
            raise TypeMismatch(f"factors at {i!r} and {j!r} differ")
    img_order = fam.order(image)
    return permute_factors(fam.assign(image), _positions(img_order, image))


def act(fam: CompatibleFamily, sigma: IndexInjection) -> CompatibleFamily:
    """The family of ``σ̂ ∘ p``."""
    return CompatibleFamily(fam.category, fam.domain, fam.index, fam.factor,
                            lambda ls: injection_action(fam, sigma, ls), kind="acted")


# verifiers

def validate_compatibility(fam: CompatibleFamily, depth: int) -> CheckReport:
    """``marginalize(assign(F'), F) = assign(F)`` for all ``F ⊆ F'`` in the window."""
    window = fam.window(depth)
    pairs = 0
    for Fp in subsets(window):
        big = fam.assign(Fp)
        order = fam.order(Fp)
        for F in subsets(order):
            pairs += 1
            if marginalize(big, _positions(order, F)) != fam.assign(F):
                return CheckReport("compatibility", False,
                                   f"marginal of assign({list(Fp)}) to {list(F)} differs",
                                   witness={"F": list(F), "F_prime": list(Fp)})
    return CheckReport("compatibility", True,
                       f"{pairs} pairs F ⊆ F' checked in window {list(window)}",
                       extra={"window": list(window)})


def displays_ci_window(fam: CompatibleFamily, depth: int) -> tuple[bool, tuple | None]:
    """Whether every ``assign(F)`` in the window displays full independence."""
    for F in subsets(fam.window(depth)):
        if not displays_ci(fam.assign(F)):
            return False, F
    return True, None


def check_infindep_lemma(fam: CompatibleFamily, i: Label, depth: int) -> CheckReport:
    """If every window marginal is independent, each ``assign(G ∋ i)`` displays
    ``X_i ⊥ X_{G∖i} ‖ A``."""
    window = fam.window(depth)
    if i not in window:
        window = window + (i,)
    ok, bad = True, None
    for F in subsets(window):
        if not displays_ci(fam.assign(F)):
            ok, bad = False, F
            break
    if not ok:
        return CheckReport("infinite independence lemma", True,
                           f"precondition fails at F={list(bad)}: lemma not applicable",
                           hypothesis=False, extra={"window": list(window)})
    checked = 0
    for G in subsets(window):
        if i not in G or len(G) < 2:
            continue
        order = fam.order(G)
        k = order.index(i)
        rest = [j for j in range(len(order)) if j != k]
        checked += 1
        if not displays_ci_partition(fam.assign(G), [[k], rest]):
            return CheckReport("infinite independence lemma", False,
                               f"X_{i} ⊥ rest fails on G={list(order)}",
                               witness={"G": list(order), "i": i}, hypothesis=True, conclusion=False)
    return CheckReport("infinite independence lemma", True,
                       f"{checked} splits X_{i} ⊥ X_(G∖{i}) verified in window {list(window)}",
                       hypothesis=True, conclusion=True, extra={"window": list(window)})


def determinism_joint(p: Morphism, s: Morphism) -> Morphism:
    """``(id_X ⊗ s) ∘ copy_X ∘ p : A → X ⊗ T``."""
    cat = p.category
    return cat.compose_all(p, cat.copy(p.cod), cat.tensor(cat.identity(p.cod), s))


def check_determinism_lemma(p: Morphism, s: Morphism) -> CheckReport:
    """If the joint of ``p`` and ``s p`` displays ``X ⊥ T ‖ A`` then ``s p`` is deterministic."""
    if not is_deterministic(s):
        raise NotDeterministic("the statistic s must be deterministic")
    cat = p.category
    joint = determinism_joint(p, s)
    hypothesis = displays_ci(joint, [p.cod, s.cod])
    sp = cat.compose(p, s)
    conclusion = is_deterministic(sp)
    passed = not hypothesis or conclusion
    return CheckReport("determinism lemma", passed,
                       f"X ⊥ T ‖ A {'holds' if hypothesis else 'fails'}; "
                       f"sp {'is' if conclusion else 'is not'} deterministic",
                       witness=None if passed else {"p": p, "s": s},
                       hypothesis=hypothesis, conclusion=conclusion)


@dataclass(frozen=True)
class StatisticFamily:
    """A statistic ``s = s_G ∘ π_G`` reading only the coordinates ``window``.

    ``window`` lists atom positions of the finite product, in increasing
    order; ``s_G`` must be deterministic.
    """

    window: tuple
    morphism: Morphism

    def __post_init__(self):
        object.__setattr__(self, "window", tuple(sorted(self.window)))
        if not is_deterministic(self.morphism):
            raise NotDeterministic("s_G must be deterministic")

    @property
    def T(self) -> Obj:
        return self.morphism.cod

    def on(self, X: Obj) -> Morphism:
        """The composite ``X → T`` for the full finite product ``X``."""
        cat = self.morphism.category
        proj = marginalize(cat.identity(X), self.window)
        if proj.cod != self.morphism.dom:
            raise TypeMismatch(f"s_G expects {self.morphism.dom!r}, window gives {proj.cod!r}")
        return cat.compose(proj, self.morphism)


def check_kolmogorov_finite(p: Morphism, stat: StatisticFamily) -> CheckReport:
    """Finite-index zero-one law: if each joint of ``X_{F'}`` and ``T`` is
    independent over ``A``, then ``s p`` is deterministic."""
    cat = p.category
    if not displays_ci(p):
        return CheckReport("kolmogorov zero-one (finite)", True,
                           "precondition fails: p does not display ⊥_i X_i ‖ A",
                           hypothesis=False)
    X = p.cod
    s = stat.on(X)
    base = cat.compose(p, cat.copy(X))
    failing = None
    for Fp in subsets(range(len(X))):
        proj = marginalize(cat.identity(X), Fp)
        joint = cat.compose(base, cat.tensor(proj, s))
        if not displays_ci(joint, [proj.cod, s.cod]):
            failing = Fp
            break
    hypothesis = failing is None
    conclusion = is_deterministic(cat.compose(p, s))
    passed = not hypothesis or conclusion
    detail = ("all X_F' ⊥ T ‖ A hold" if hypothesis else f"X_F' ⊥ T fails at F'={list(failing)}")
    return CheckReport("kolmogorov zero-one (finite)", passed,
                       f"{detail}; sp {'is' if conclusion else 'is not'} deterministic",
                       witness=None if passed else {"p": p, "s": s},
                       hypothesis=hypothesis, conclusion=conclusion)


def check_hs_splitting(fam: CompatibleFamily, tau1: IndexInjection, tau2: IndexInjection,
                       F1: Iterable[Label], F2: Iterable[Label]) -> CheckReport:
    """Finite-window form of the splitting step: the joint of ``τ̂₁ p`` and
    ``τ̂₂ p`` through one copy of ``X_J`` equals two independent copies of ``p``."""
    F1, F2 = fam.order(F1), fam.order(F2)
    W = set(F1) | set(F2)
    if set(tau1.image(W)) & set(tau2.image(W)):
        raise OverlappingImages("τ1 and τ2 have overlapping images on the window")
    cat, A = fam.category, fam.domain
    img1, img2 = tau1.image(F1), tau2.image(F2)
    U = fam.order(img1 + img2)
    a1 = injection_action(fam, tau1, F1)
    a2 = injection_action(fam, tau2, F2)
    pre_ci = displays_ci(fam.assign(U))
    pre_exch = a1 == fam.assign(F1) and a2 == fam.assign(F2)
    if not (pre_ci and pre_exch):
        what = "independence" if not pre_ci else "exchangeability"
        return CheckReport("hewitt-savage splitting", True,
                           f"precondition ({what}) fails: not applicable", hypothesis=False)
    joint = cat.compose(fam.assign(U), cat.copy(fam.obj(U)))
    positions = _positions(U, img1) + [len(U) + k for k in _positions(U, img2)]
    lhs = _select(joint, positions)
    rhs_action = cat.compose(cat.copy(A), cat.tensor(a1, a2))
    rhs_iid = cat.compose(cat.copy(A), cat.tensor(fam.assign(F1), fam.assign(F2)))
    conclusion = lhs == rhs_action and lhs == rhs_iid
    return CheckReport("hewitt-savage splitting", conclusion,
                       f"F1={list(F1)} via {tau1.description}, F2={list(F2)} via {tau2.description}: "
                       f"{'equal' if conclusion else 'differ'}",
                       witness=None if conclusion else {"F1": list(F1), "F2": list(F2), "lhs": lhs,
                                                        "rhs": rhs_iid},
                       hypothesis=True, conclusion=conclusion)


def check_aseq_lemma(p: Morphism, f: Morphism, g: Morphism) -> CheckReport:
    """In a causal category with ``f`` deterministic:
    ``(f⊗f)∘copy∘p = (f⊗g)∘copy∘p`` implies ``f =_{p-a.s.} g``."""
    cat = p.category
    if cat.causal is not True:
        raise MarkovError(f"{cat.name} is not known to be causal")
    if not is_deterministic(f):
        raise NotDeterministic("f must be deterministic")
    base = cat.compose(p, cat.copy(p.cod))
    hypothesis = cat.compose(base, cat.tensor(f, f)) == cat.compose(base, cat.tensor(f, g))
    conclusion = as_equal(p, f, g)
    passed = not hypothesis or conclusion
    return CheckReport("a.s.-equality lemma", passed,
                       f"hypothesis {'holds' if hypothesis else 'fails'}, "
                       f"f =_p g {'holds' if conclusion else 'fails'}",
                       witness=None if passed else {"p": p, "f": f, "g": g},
                       hypothesis=hypothesis, conclusion=conclusion)


def check_marginalization_determinism(cat: MarkovCategory, X: Obj, keep: Iterable[int]) -> CheckReport:
    """The structural projection ``X_{F'} → X_F`` is deterministic."""
    keep = sorted(keep)
    proj = marginalize(cat.identity(X), keep)
    ok = is_deterministic(proj)
    return CheckReport("marginalization determinism", ok,
                       f"projection of {X!r} onto {keep} {'is' if ok else 'is not'} deterministic",
                       witness=None if ok else {"keep": keep})


def check_deterministic_family(fam: CompatibleFamily, depth: int) -> CheckReport:
    """A family of deterministic marginals induces a deterministic joint:
    for ``F ⊆ F'`` the copied ``assign(F')`` marginalized to ``X_F ⊗ X_F``
    equals ``(assign(F) ⊗ assign(F)) ∘ copy_A``."""
    cat, A = fam.category, fam.domain
    window = fam.window(depth)
    for Fp in subsets(window):
        m = fam.assign(Fp)
        if not is_deterministic(m):
            return CheckReport("deterministic family", True,
                               f"assign({list(Fp)}) is not deterministic: not applicable",
                               hypothesis=False)
    for Fp in subsets(window):
        order = fam.order(Fp)
        copied = cat.compose(fam.assign(Fp), cat.copy(fam.obj(Fp)))
        for F in subsets(order):
            pos = _positions(order, F)
            lhs = _select(copied, pos + [len(order) + k for k in pos])
            rhs = cat.compose(cat.copy(A), cat.tensor(fam.assign(F), fam.assign(F)))
            if lhs != rhs:
                return CheckReport("deterministic family", False, f"fails at F={list(F)} ⊆ {list(Fp)}",
                                   witness={"F": list(F), "F_prime": list(Fp)},
                                   hypothesis=True, conclusion=False)
    return CheckReport("deterministic family", True, f"window {list(window)}",
                       hypothesis=True, conclusion=True)


def compare_families(f1: CompatibleFamily, f2: CompatibleFamily, depth: int) -> CheckReport:
    """Exact agreement of two families on every subset of a shared window.

    Used for the comparison isomorphism: adjoining a one-label family by
    ``product_family`` and enlarging the index set give the same data up to
    relabeling, and with shared labels the relabeling is the identity.
    """
    w1, w2 = f1.window(depth), f2.window(depth)
    if set(w1) != set(w2):
        return CheckReport("family comparison", False, "windows hold different labels",
                           witness={"left": list(w1), "right": list(w2)})
    for F in subsets(w1):
        if f1.assign(F) != f2.assign(F):
            return CheckReport("family comparison", False, f"assign({list(F)}) differs",
                               witness={"F": list(F)})
    return CheckReport("family comparison", True, f"{2 ** len(w1)} subsets of {list(w1)} agree")
