"""Multivalued maps between finite carriers, stored as bitsets.

Shared by the nonempty-powerset Kleisli category and the lower Vietoris
Kleisli category on finite spaces: the latter only adds a closure
operator after composition and tensoring.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .finstoch import point_index, points, size
from .kernel.core import MarkovCategory, MarkovError, Morphism, Obj, TypeMismatch


class InvalidMap(MarkovError):
    """An image set is empty, not closed, or the map is not continuous."""


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


class RelationalMap(Morphism):
    """``images[i]`` is the bitset (over ``points(cod)``) of point ``i`` of ``dom``."""

    __slots__ = ("dom", "cod", "images")

    def __init__(self, dom: Obj, cod: Obj, images):
        images = tuple(int(m) for m in images)
        if len(images) != size(dom):
            raise TypeMismatch(f"{len(images)} images for a domain of {size(dom)} points")
        full = (1 << size(cod)) - 1
        for i, m in enumerate(images):
            if m == 0:
                raise InvalidMap(f"image of {points(dom)[i]} is empty")
            if m & ~full:
                raise InvalidMap(f"image of {points(dom)[i]} leaves the codomain")
        self.dom, self.cod, self.images = dom, cod, images

    def image(self, x) -> frozenset:
        """Image of the point ``x`` (a label tuple, or a bare label on atoms)."""
        if len(self.dom) == 1 and not isinstance(x, tuple):
            x = (x,)
        pts = points(self.cod)
        return frozenset(_unwrap(self.cod, pts[j]) for j in bits(self.images[point_index(self.dom, x)]))

    def is_singleton_valued(self) -> bool:
        return all(m & (m - 1) == 0 for m in self.images)

    def __eq__(self, other):
        if not isinstance(other, RelationalMap) or type(self) is not type(other):
            return NotImplemented
        return self.dom == other.dom and self.cod == other.cod and self.images == other.images

    def __repr__(self):
        body = ", ".join(
            f"{_unwrap(self.dom, p)}↦{sorted(map(repr, self.image(p)))}" for p in points(self.dom))
        return f"{type(self).__name__}({self.dom!r} → {self.cod!r}: {body})"

    def to_json(self) -> dict:
        def labels(X):
            return [_label_json(_unwrap(X, p)) for p in points(X)]
        return {
            "dom": labels(self.dom),
            "cod": labels(self.cod),
            "image": {_key(_unwrap(self.dom, p)): sorted((_label_json(y) for y in self.image(p)), key=repr)
                      for p in points(self.dom)},
        }


def _unwrap(X: Obj, p: tuple):
    return p[0] if len(X) == 1 else p


def _label_json(x):
    return list(x) if isinstance(x, tuple) else x


def _key(x) -> str:
    return ",".join(map(str, x)) if isinstance(x, tuple) else str(x)


class RelationalCategory(MarkovCategory):
    """Composition is the (closed) union of images, tensor the product."""

    map_class: type[RelationalMap] = RelationalMap

    def point_closures(self, X: Obj) -> tuple[int, ...]:
        """Bitset of the closure of each single point of ``X``."""
        return tuple(1 << i for i in range(size(X)))

    def closure_mask(self, X: Obj, mask: int) -> int:
        cl = self.point_closures(X)
        out = 0
        for i in bits(mask):
            out |= cl[i]
        return out

    def _make(self, dom, cod, images):
        return self.map_class(dom, cod, images)

    def _from_targets(self, dom: Obj, cod: Obj, targets) -> RelationalMap:
        cl = self.point_closures(cod)
        return self._make(dom, cod, [cl[int(t)] for t in targets])

    def identity(self, X: Obj):
        return self._from_targets(X, X, range(size(X)))

    def compose(self, f, g):
        if f.cod != g.dom:
            raise TypeMismatch(f"cannot compose {f.dom!r}→{f.cod!r} with {g.dom!r}→{g.cod!r}")
        out = []
        for m in f.images:
            u = 0
            for y in bits(m):
                u |= g.images[y]
            out.append(self.closure_mask(g.cod, u))
        return self._make(f.dom, g.cod, out)

    def tensor(self, f, g):
        ny = size(g.cod)
        gbits = [bits(m) for m in g.images]
        cod = f.cod @ g.cod
        out = []
        for ma in f.images:
            for mb in gbits:
                u = 0
                for x in bits(ma):
                    base = x * ny
                    for y in mb:
                        u |= 1 << (base + y)
                out.append(u)
        out = [self.closure_mask(cod, u) for u in out]
        return self._make(f.dom @ g.dom, cod, out)

    def copy(self, X: Obj):
        n = size(X)
        return self._from_targets(X, X @ X, [i * n + i for i in range(n)])

    def discard(self, X: Obj):
        return self._make(X, Obj(), [1] * size(X))

    def swap(self, X: Obj, Y: Obj):
        n = len(X)
        return self.permute(X @ Y, list(range(n, n + len(Y))) + list(range(n)))

    def permute(self, X: Obj, perm):
        perm = tuple(perm)
        if sorted(perm) != list(range(len(X))):
            raise ValueError(f"{perm} is not a permutation of {len(X)} factors")
        return self._from_targets(X, X.select(perm), _perm_targets(X, perm))

    def function(self, dom: Obj, cod: Obj, fn):
        """The map sending each point to (the closure of) ``{fn(x)}``."""
        targets = []
        for p in points(dom):
            y = fn(_unwrap(dom, p))
            targets.append(point_index(cod, y if len(cod) != 1 else (y,)))
        return self._from_targets(dom, cod, targets)

    def from_sets(self, dom: Obj, cod: Obj, images) -> RelationalMap:
        """Map from a dict or list of image sets of labels (bare labels on atoms)."""
        pts = points(dom)
        if isinstance(images, dict):
            images = [images[_unwrap(dom, p)] for p in pts]
        masks = []
        for s in images:
            masks.append(mask_of(point_index(cod, y if len(cod) != 1 else (y,)) for y in s))
        return self._make(dom, cod, masks)


@lru_cache(maxsize=4096)
def _perm_targets(X: Obj, perm: tuple) -> list[int]:
    sizes = [len(a) for a in X.factors]
    if not sizes:
        return [0]
    source = np.arange(size(X)).reshape(sizes).transpose(perm).ravel()
    targets = np.empty(size(X), dtype=np.int64)
    targets[source] = np.arange(size(X))
    return targets.tolist()
