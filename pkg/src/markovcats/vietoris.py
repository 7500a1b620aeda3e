"""Finite topological spaces and the Kleisli category of the lower Vietoris
(hyperspace) monad restricted to them.

A finite space is determined by its specialization preorder
(``x ≤ y`` iff ``x ∈ cl{y}``): closed sets are down-sets, opens are
up-sets, and the product topology on a finite product is the product
preorder.  All topology on tensor words is therefore computed from the
atoms' preorders without enumerating the (possibly huge) product opens.

Continuity of ``f: X → HY`` for the topology generated by ``Hit(U)``
only needs checking on the basic opens ``U = ↑y``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._relational import InvalidMap, RelationalCategory, RelationalMap, bits, mask_of
from .finstoch import points, size
from .kernel.core import CheckReport, Obj
from .kernel.predicates import check_causality_triple


@dataclass(frozen=True)
class FiniteTopSpace:
    """Finite space given by its open sets (frozensets of point labels)."""

    labels: tuple
    opens: frozenset

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        opens = frozenset(frozenset(u) for u in self.opens)
        object.__setattr__(self, "opens", opens)
        if not labels or len(set(labels)) != len(labels):
            raise ValueError("points must be nonempty and distinct")
        full = frozenset(labels)
        if frozenset() not in opens or full not in opens:
            raise ValueError("opens must contain ∅ and the whole space")
        for u in opens:
            if not u <= full:
                raise ValueError(f"open set {set(u)} is not a subset of the points")
        for u, v in itertools.combinations(opens, 2):
            if u | v not in opens or u & v not in opens:
                raise ValueError("opens must be closed under union and intersection")

    @classmethod
    def from_opens(cls, labels, opens) -> tuple["FiniteTopSpace", list[frozenset]]:
        """Complete ``opens`` under union and intersection; also return what was added."""
        labels = tuple(labels)
        given = {frozenset(u) for u in opens}
        current = set(given) | {frozenset(), frozenset(labels)}
        changed = True
        while changed:
            changed = False
            for u, v in itertools.combinations(list(current), 2):
                for w in (u | v, u & v):
                    if w not in current:
                        current.add(w)
                        changed = True
        added = sorted(current - given, key=lambda s: (len(s), sorted(map(str, s))))
        return cls(labels, frozenset(current)), added

    @classmethod
    def discrete(cls, labels) -> "FiniteTopSpace":
        labels = tuple(labels)
        opens = frozenset(frozenset(c) for r in range(len(labels) + 1)
                          for c in itertools.combinations(labels, r))
        return cls(labels, opens)

    @classmethod
    def indiscrete(cls, labels) -> "FiniteTopSpace":
        return cls(tuple(labels), frozenset({frozenset(), frozenset(labels)}))

    @classmethod
    def sierpinski(cls) -> "FiniteTopSpace":
        """Points ``0`` (closed) and ``1`` (open)."""
        return cls(("0", "1"), frozenset({frozenset(), frozenset({"1"}), frozenset({"0", "1"})}))

    @classmethod
    def from_preorder(cls, labels, leq) -> "FiniteTopSpace":
        """Space whose opens are the up-sets of the preorder ``leq(x, y)``."""
        labels = tuple(labels)
        opens = set()
        for r in range(len(labels) + 1):
            for c in itertools.combinations(labels, r):
                s = set(c)
                if all(y in s for x in s for y in labels if leq(x, y)):
                    opens.add(frozenset(s))
        return cls(labels, frozenset(opens))

    def __len__(self):
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown point {label!r}") from None

    @property
    def up_masks(self) -> tuple[int, ...]:
        """Minimal open neighbourhood of each point, as a bitset."""
        return _atom_masks(self)[0]

    @property
    def down_masks(self) -> tuple[int, ...]:
        """Closure of each point, as a bitset."""
        return _atom_masks(self)[1]

    def closed_sets(self) -> list[frozenset]:
        full = frozenset(self.labels)
        return [full - u for u in self.opens]

    def __repr__(self):
        return "Top{" + ",".join(map(str, self.labels)) + f"|{len(self.opens)} opens}}"


@lru_cache(maxsize=None)
def _atom_masks(space: FiniteTopSpace):
    n = len(space.labels)
    up = []
    for i, x in enumerate(space.labels):
        nbhd = frozenset(space.labels)
        for u in space.opens:
            if x in u:
                nbhd &= u
        up.append(mask_of(space.index(y) for y in nbhd))
    down = [mask_of(j for j in range(n) if up[j] >> i & 1) for i in range(n)]
    return tuple(up), tuple(down)


def _product_masks(masks_per_atom: list[tuple[int, ...]], sizes: list[int]) -> tuple[int, ...]:
    out = [1]
    width = 1
    for masks, n in zip(masks_per_atom, sizes):
        new = []
        for m in out:
            for k in range(n):
                u = 0
                for a in bits(m):
                    for b in bits(masks[k]):
                        u |= 1 << (a * n + b)
                new.append(u)
        out, width = new, width * n
    return tuple(out)


@lru_cache(maxsize=4096)
def word_down_masks(X: Obj) -> tuple[int, ...]:
    return _product_masks([a.down_masks for a in X.factors], [len(a) for a in X.factors])


@lru_cache(maxsize=4096)
def word_up_masks(X: Obj) -> tuple[int, ...]:
    return _product_masks([a.up_masks for a in X.factors], [len(a) for a in X.factors])


class ClosedSetMap(RelationalMap):
    """Continuous map ``dom → H(cod)``: each image a nonempty closed set."""

    def __init__(self, dom: Obj, cod: Obj, images):
        super().__init__(dom, cod, images)
        cl = word_down_masks(cod)
        for i, m in enumerate(self.images):
            c = 0
            for j in bits(m):
                c |= cl[j]
            if c != m:
                raise InvalidMap(f"image of {points(dom)[i]} is not closed")


class VietorisCategory(RelationalCategory):
    name = "vietoris"
    causal = False
    map_class = ClosedSetMap

    def point_closures(self, X: Obj):
        return word_down_masks(X)

    def from_sets(self, dom, cod, images):
        f = super().from_sets(dom, cod, images)
        report = continuity_check(f)
        if not report.passed:
            raise InvalidMap(report.detail)
        return f


VIETORIS = VietorisCategory()
ClosedSetMap.category = VIETORIS


def space(space_: FiniteTopSpace) -> Obj:
    return Obj((space_,))


def closure(S, X) -> frozenset:
    """Smallest closed superset of ``S``; ``X`` is a space or a word object."""
    if isinstance(X, FiniteTopSpace):
        X = Obj((X,))
    pts = points(X)
    single = len(X) == 1
    idx = {(p[0] if single else p): i for i, p in enumerate(pts)}
    mask = VIETORIS.closure_mask(X, mask_of(idx[s] for s in S))
    return frozenset(pts[j][0] if single else pts[j] for j in bits(mask))


def continuity_check(f: RelationalMap) -> CheckReport:
    """For every basic open ``U = ↑y`` of ``cod``, ``{x : f(x) ∩ U ≠ ∅}`` is open."""
    up_cod = word_up_masks(f.cod)
    up_dom = word_up_masks(f.dom)
    for y, u in enumerate(up_cod):
        pre = mask_of(x for x, m in enumerate(f.images) if m & u)
        for x in bits(pre):
            if up_dom[x] & ~pre:
                return CheckReport(
                    "continuity", False,
                    f"preimage of Hit(↑{points(f.cod)[y]}) is not open",
                    witness={"open": points(f.cod)[y], "preimage": [points(f.dom)[i] for i in bits(pre)]})
    return CheckReport("continuity", True, "all Hit(U) preimages are open")


def compose(f: ClosedSetMap, g: ClosedSetMap) -> ClosedSetMap:
    """``(g ∘ f)(x) = cl(⋃_{y ∈ f(x)} g(y))``."""
    return VIETORIS.compose(f, g)


def structural(X: Obj) -> dict:
    return {
        "copy": VIETORIS.copy(X),
        "discard": VIETORIS.discard(X),
        "swap": VIETORIS.swap(X, X),
        "product": lambda Y: X @ Y,
        "tensor": VIETORIS.tensor,
    }


@lru_cache(maxsize=None)
def all_spaces(n: int) -> tuple[FiniteTopSpace, ...]:
    """Every topology on the points ``0..n-1`` (labelled, not up to homeomorphism)."""
    labels = tuple(str(i) for i in range(n))
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    for choice in itertools.product((False, True), repeat=len(pairs)):
        rel = {(i, i) for i in range(n)} | {p for p, c in zip(pairs, choice) if c}
        if all((a, d) in rel for (a, b) in rel for (c, d) in rel if b == c):
            out.append(FiniteTopSpace.from_preorder(
                labels, lambda x, y, rel=rel: (int(x), int(y)) in rel))
    return tuple(out)


def random_closed_map(dom: Obj, cod: Obj, rng: np.random.Generator) -> ClosedSetMap:
    """Random continuous map: random closed images, then made monotone."""
    n = size(cod)
    raw = [VIETORIS.closure_mask(cod, int(rng.integers(1, 1 << n))) for _ in range(size(dom))]
    down = word_down_masks(dom)
    images = []
    for x in range(size(dom)):
        u = 0
        for a in bits(down[x]):
            u |= raw[a]
        images.append(u)
    return ClosedSetMap(dom, cod, images)


@dataclass
class SearchResult:
    found: dict | None
    examined: int
    skipped_equal: int
    hypothesis_true: int
    seed: int
    log: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "found": self.found is not None,
            "examined": self.examined,
            "skipped_equal": self.skipped_equal,
            "hypothesis_true": self.hypothesis_true,
            "seed": self.seed,
        }
        if self.found is not None:
            out["counterexample"] = {k: (v.to_json() if hasattr(v, "to_json") else v)
                                     for k, v in self.found.items()}
        return out


def causality_search(max_points: int = 3, seed: int = 0, budget: int = 1000,
                     discrete_only: bool = False) -> SearchResult:
    """Random search for a quadruple violating causality on small spaces.

    Returns the first quadruple whose hypothesis holds but conclusion fails,
    or ``found=None`` when the budget runs out; a miss says nothing about
    existence.  Quadruples with ``h1 == h2`` are skipped.
    """
    rng = np.random.default_rng(seed)
    pools = {n: ([FiniteTopSpace.discrete([str(i) for i in range(n)])] if discrete_only
                 else list(all_spaces(n))) for n in range(1, max_points + 1)}

    def pick():
        n = int(rng.integers(1, max_points + 1))
        pool = pools[n]
        return Obj((pool[int(rng.integers(len(pool)))],))

    skipped = hyp = 0
    for k in range(budget):
        A, X, Y, Z = Obj((pools[1][0],)), pick(), pick(), pick()
        f = random_closed_map(A, X, rng)
        g = random_closed_map(X, Y, rng)
        h1 = random_closed_map(Y, Z, rng)
        h2 = random_closed_map(Y, Z, rng)
        if h1 == h2:
            skipped += 1
            continue
        report = check_causality_triple(f, g, h1, h2)
        hyp += bool(report.hypothesis)
        if not report.passed:
            return SearchResult({"f": f, "g": g, "h1": h1, "h2": h2}, k + 1, skipped, hyp, seed)
    return SearchResult(None, budget, skipped, hyp, seed)


def space_from_json(data: dict) -> FiniteTopSpace:
    """Load ``{"points": [...], "opens": [[...], ...]}``, completing the opens."""
    sp, _ = FiniteTopSpace.from_opens(data["points"], data.get("opens", []))
    return sp


def map_from_json(data: dict) -> ClosedSetMap:
    """Load ``{"dom": space, "cod": space, "image": {"x": ["y", ...]}}``."""
    try:
        dom = Obj((space_from_json(data["dom"]),))
        cod = Obj((space_from_json(data["cod"]),))
        image = data["image"]
        return VIETORIS.from_sets(dom, cod, [image[str(x)] for x in dom.factors[0].labels])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidMap(f"malformed closed-set map: {exc}") from None
