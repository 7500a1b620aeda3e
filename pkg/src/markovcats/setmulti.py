"""Finite sets with multivalued maps (Kleisli category of the nonempty
powerset monad), and the finite shadow of its missing Kolmogorov products.
"""

from __future__ import annotations

import itertools

import numpy as np

from ._relational import InvalidMap, RelationalCategory, RelationalMap, bits, mask_of
from .finstoch import FinSet, point_index, points, size
from .kernel.core import CheckReport, Obj
from .kernel.predicates import marginalize


class MultiMap(RelationalMap):
    """``dom → cod`` sending each point to a nonempty subset of ``cod``."""


class SetMultiCategory(RelationalCategory):
    name = "setmulti"
    map_class = MultiMap


SETMULTI = SetMultiCategory()
MultiMap.category = SETMULTI


def compose(f: MultiMap, g: MultiMap) -> MultiMap:
    """``(g ∘ f)(x) = ⋃_{y ∈ f(x)} g(y)``."""
    return SETMULTI.compose(f, g)


def tensor(f: MultiMap, g: MultiMap) -> MultiMap:
    return SETMULTI.tensor(f, g)


def structural(X: Obj) -> dict:
    return {
        "copy": SETMULTI.copy(X),
        "discard": SETMULTI.discard(X),
        "swap": SETMULTI.swap(X, X),
        "tensor": SETMULTI.tensor,
    }


def state(X: Obj, subset) -> MultiMap:
    """The morphism ``I → X`` picking the nonempty ``subset`` of points."""
    return SETMULTI.from_sets(Obj(), X, [subset])


def state_set(s: MultiMap) -> frozenset:
    """The subset of ``cod`` chosen by a state ``I → cod``."""
    if s.dom != Obj():
        raise ValueError("not a state")
    return s.image(())


def marginal_image(S, X: Obj, keep) -> frozenset:
    """Coordinate projection of the nonempty ``S ⊆ X`` onto positions ``keep``.

    ``S`` is a set of label tuples or a state ``I → X``.  With ``keep``
    empty the result is the one-point set ``{()}``.
    """
    if isinstance(S, MultiMap):
        S = state_set(S)
        if len(X) == 1:
            S = {(s,) for s in S}
    S = set(S)
    if not S:
        raise ValueError("S must be nonempty")
    keep = sorted(keep)
    return frozenset(tuple(s[k] for k in keep) for s in S)


def nonextension_witness(N: int):
    """Two distinct subsets of ``{0,1}^N`` with the same proper marginals.

    ``A`` holds the sequences with at least one 1, ``B`` those with at least
    one 0.  Their projections to every proper coordinate subset coincide,
    which is the finite trace of why products of sets fail the uniqueness
    half of the infinite-tensor-product universal property here.
    """
    if N < 1:
        raise ValueError("N must be ≥ 1")
    X = Obj(tuple(FinSet(("0", "1")) for _ in range(N)))
    seqs = list(itertools.product("01", repeat=N))
    A = frozenset(s for s in seqs if "1" in s)
    B = frozenset(s for s in seqs if "0" in s)
    bare = (lambda S: {x[0] for x in S}) if N == 1 else (lambda S: S)
    sa, sb = state(X, bare(A)), state(X, bare(B))
    for r in range(N):
        for F in itertools.combinations(range(N), r):
            ia, ib = marginal_image(A, X, F), marginal_image(B, X, F)
            # the categorical marginal must agree with coordinate projection
            ma, mb = marginalize(sa, F), marginalize(sb, F)
            if ia != ib or ma != mb or _state_tuples(ma) != ia:
                return A, B, CheckReport(
                    "setmulti non-extension", False,
                    f"marginals differ on F={list(F)}", witness={"F": list(F)})
    if A == B:
        return A, B, CheckReport("setmulti non-extension", False, "A equals B", witness={"N": N})
    return A, B, CheckReport(
        "setmulti non-extension", True,
        f"N={N}: the two states differ but all {2 ** N - 1} proper marginal images agree",
        extra={"N": N, "size_A": len(A), "size_B": len(B)})


def _state_tuples(s: MultiMap) -> frozenset:
    pts = points(s.cod)
    return frozenset(pts[j] for j in bits(s.images[0]))


def random_multimap(dom: Obj, cod: Obj, rng: np.random.Generator, max_size: int | None = None) -> MultiMap:
    n = size(cod)
    images = []
    for _ in range(size(dom)):
        k = int(rng.integers(1, (max_size or n) + 1))
        images.append(mask_of(rng.choice(n, size=min(k, n), replace=False).tolist()))
    return MultiMap(dom, cod, images)


def from_json(data: dict) -> MultiMap:
    """Load ``{"dom": [...], "cod": [...], "image": {"x": ["y1", ...], ...}}``."""
    try:
        dom = Obj((FinSet(tuple(data["dom"])),))
        cod = Obj((FinSet(tuple(data["cod"])),))
        image = data["image"]
        images = [image[str(x)] for x in dom.factors[0].labels]
        return SETMULTI.from_sets(dom, cod, images)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidMap(f"malformed multivalued map: {exc}") from None


__all__ = [
    "MultiMap", "SETMULTI", "compose", "tensor", "structural", "state", "state_set",
    "marginal_image", "nonextension_witness", "random_multimap", "from_json",
    "point_index",
]
