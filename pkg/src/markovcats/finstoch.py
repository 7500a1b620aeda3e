"""Finite sets and exact rational stochastic matrices.

A matrix is stored as an integer numerator array over one common
denominator, reduced to lowest terms.  Row sums bound every entry of a
product or Kronecker product by the product of the two denominators, so
int64 arithmetic is exact whenever that product stays below 2**62; larger
denominators fall back to Python integers in object arrays.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np

from .kernel.core import MarkovCategory, MarkovError, Morphism, Obj, TypeMismatch

_INT64_SAFE = 2 ** 62


class InvalidKernel(MarkovError):
    """A matrix is not stochastic (negative entry or row sum ≠ 1)."""


@dataclass(frozen=True)
class FinSet:
    labels: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise ValueError("finite sets must be nonempty")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in {labels}")

    @classmethod
    def range(cls, n: int) -> "FinSet":
        return cls(tuple(str(i) for i in range(n)))

    def __len__(self):
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown label {label!r}") from None

    def __repr__(self):
        return "{" + ",".join(map(str, self.labels)) + "}"


def finset(*labels) -> Obj:
    """Single-atom object on the given labels."""
    return Obj((FinSet(tuple(labels)),))


def size(X: Obj) -> int:
    return math.prod(len(a) for a in X.factors)


def points(X: Obj) -> list[tuple]:
    """Carrier of ``X``: tuples of labels, lexicographic in factor order."""
    return list(itertools.product(*(a.labels for a in X.factors)))


def point_index(X: Obj, point: Sequence) -> int:
    if len(point) != len(X):
        raise KeyError(f"{point!r} has the wrong arity for {X!r}")
    idx = 0
    for atom, label in zip(X.factors, point):
        idx = idx * len(atom) + atom.index(label)
    return idx


def _normalize(num: np.ndarray, den: int) -> tuple[np.ndarray, int]:
    flat = num.ravel()
    if num.dtype == object:
        g = reduce(math.gcd, (int(v) for v in flat), den)
    else:
        g = math.gcd(int(np.gcd.reduce(flat)) if flat.size else 0, den)
    if g > 1:
        num = num // g
        den //= g
    if den < _INT64_SAFE:
        if num.dtype == object:
            num = num.astype(np.int64)
    elif num.dtype != object:
        num = num.astype(object)
    return num, den


def _work_dtype(den_a: int, den_b: int):
    return np.int64 if den_a * den_b < _INT64_SAFE else object


class StochMatrix(Morphism):
    """Exact stochastic matrix ``dom → cod``; rows indexed by ``points(dom)``."""

    __slots__ = ("dom", "cod", "num", "den")

    def __init__(self, dom: Obj, cod: Obj, num: np.ndarray, den: int, *, check: bool = True):
        num = np.asarray(num)
        if num.shape != (size(dom), size(cod)):
            raise TypeMismatch(f"matrix shape {num.shape} does not match {dom!r} → {cod!r}")
        den = int(den)
        if check:
            if den <= 0:
                raise InvalidKernel("denominator must be positive")
            if (num < 0).any():
                raise InvalidKernel("negative entry")
            sums = num.sum(axis=1)
            if any(int(s) != den for s in sums):
                bad = next(i for i, s in enumerate(sums) if int(s) != den)
                raise InvalidKernel(
                    f"row {points(dom)[bad]} sums to {Fraction(int(sums[bad]), den)}, not 1")
        self.dom, self.cod = dom, cod
        self.num, self.den = _normalize(num, den)

    @classmethod
    def from_rows(cls, dom: Obj, cod: Obj, rows) -> "StochMatrix":
        """Build from nested rows of rationals (Fractions, ints or 'p/q' strings)."""
        fr = [[Fraction(v) for v in row] for row in rows]
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (v.denominator for row in fr for v in row), 1)
        num = np.array([[int(v * den) for v in row] for row in fr], dtype=object)
        if num.size == 0:
            num = num.reshape(len(fr), size(cod))
        return cls(dom, cod, num, den)

    @property
    def entries(self) -> np.ndarray:
        """Object array of Fractions."""
        out = np.empty(self.num.shape, dtype=object)
        for idx, v in np.ndenumerate(self.num):
            out[idx] = Fraction(int(v), self.den)
        return out

    def rows(self) -> list[list[Fraction]]:
        return self.entries.tolist()

    def prob(self, x, y) -> Fraction:
        """Probability of output point ``y`` given input ``x`` (label tuples)."""
        i, j = point_index(self.dom, x), point_index(self.cod, y)
        return Fraction(int(self.num[i, j]), self.den)

    def is_zero_one(self) -> bool:
        return bool(((self.num == 0) | (self.num == self.den)).all())

    def support(self, row: int = 0) -> list[int]:
        return [j for j in range(self.num.shape[1]) if self.num[row, j] != 0]

    def __eq__(self, other):
        if not isinstance(other, StochMatrix):
            return NotImplemented
        return (self.dom == other.dom and self.cod == other.cod and self.den == other.den
                and np.array_equal(self.num, other.num))

    def __repr__(self):
        rows = "; ".join(" ".join(str(v) for v in row) for row in self.rows())
        return f"StochMatrix({self.dom!r} → {self.cod!r}: [{rows}])"

    def to_json(self) -> dict:
        def labels(X):
            if len(X) == 1:
                return list(X.factors[0].labels)
            return [list(p) for p in points(X)]
        return {
            "dom": labels(self.dom),
            "cod": labels(self.cod),
            "rows": [[_fmt(v) for v in row] for row in self.rows()],
        }


def _fmt(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _zero_one(dom: Obj, cod: Obj, targets: np.ndarray) -> StochMatrix:
    """Deterministic matrix sending row ``i`` to column ``targets[i]``."""
    num = np.zeros((size(dom), size(cod)), dtype=np.int64)
    num[np.arange(len(targets)), targets] = 1
    return StochMatrix(dom, cod, num, 1, check=False)


class FinStochCategory(MarkovCategory):
    name = "finstoch"
    causal = True

    def identity(self, X: Obj) -> StochMatrix:
        return _identity(X)

    def compose(self, f: StochMatrix, g: StochMatrix) -> StochMatrix:
        if f.cod != g.dom:
            raise TypeMismatch(f"cannot compose {f.dom!r}→{f.cod!r} with {g.dom!r}→{g.cod!r}")
        dt = _work_dtype(f.den, g.den)
        num = f.num.astype(dt, copy=False) @ g.num.astype(dt, copy=False)
        return StochMatrix(f.dom, g.cod, num, f.den * g.den, check=False)

    def tensor(self, f: StochMatrix, g: StochMatrix) -> StochMatrix:
        dt = _work_dtype(f.den, g.den)
        num = np.kron(f.num.astype(dt, copy=False), g.num.astype(dt, copy=False))
        return StochMatrix(f.dom @ g.dom, f.cod @ g.cod, num, f.den * g.den, check=False)

    def copy(self, X: Obj) -> StochMatrix:
        return _copy(X)

    def discard(self, X: Obj) -> StochMatrix:
        return _discard(X)

    def swap(self, X: Obj, Y: Obj) -> StochMatrix:
        n = len(X)
        return self.permute(X @ Y, list(range(n, n + len(Y))) + list(range(n)))

    def permute(self, X: Obj, perm) -> StochMatrix:
        return _permute(X, tuple(perm))

    def dirac(self, X: Obj, x) -> StochMatrix:
        """Point mass ``I → X`` at the label tuple (or single label) ``x``."""
        if len(X) == 1 and not isinstance(x, tuple):
            x = (x,)
        return _zero_one(Obj(), X, np.array([point_index(X, x)]))

    def function(self, dom: Obj, cod: Obj, fn) -> StochMatrix:
        """Deterministic matrix of a function on label tuples."""
        targets = [point_index(cod, _as_tuple(cod, fn(_unwrap(dom, p)))) for p in points(dom)]
        return _zero_one(dom, cod, np.array(targets, dtype=np.int64))

    def state(self, X: Obj, probs) -> StochMatrix:
        return StochMatrix.from_rows(Obj(), X, [list(probs)])

    def kernel(self, dom: Obj, cod: Obj, rows) -> StochMatrix:
        return StochMatrix.from_rows(dom, cod, rows)


def _as_tuple(X: Obj, p):
    return p if len(X) != 1 else (p,)


def _unwrap(X: Obj, p):
    return p[0] if len(X) == 1 else p


@lru_cache(maxsize=4096)
def _identity(X: Obj) -> StochMatrix:
    return _zero_one(X, X, np.arange(size(X)))


@lru_cache(maxsize=4096)
def _copy(X: Obj) -> StochMatrix:
    n = size(X)
    i = np.arange(n)
    return _zero_one(X, X @ X, i * n + i)


@lru_cache(maxsize=4096)
def _discard(X: Obj) -> StochMatrix:
    return _zero_one(X, Obj(), np.zeros(size(X), dtype=np.int64))


@lru_cache(maxsize=8192)
def _permute(X: Obj, perm: tuple) -> StochMatrix:
    if sorted(perm) != list(range(len(X))):
        raise ValueError(f"{perm} is not a permutation of {len(X)} factors")
    sizes = [len(a) for a in X.factors]
    out_obj = X.select(perm)
    if not sizes:
        return _identity(X)
    # position o of the transposed array holds the input index mapped to output o
    source = np.arange(size(X)).reshape(sizes).transpose(perm).ravel()
    targets = np.empty(size(X), dtype=np.int64)
    targets[source] = np.arange(size(X))
    return _zero_one(X, out_obj, targets)


FINSTOCH = FinStochCategory()
StochMatrix.category = FINSTOCH


def compose(f: StochMatrix, g: StochMatrix) -> StochMatrix:
    """``g ∘ f`` by the Chapman–Kolmogorov sum."""
    return FINSTOCH.compose(f, g)


def tensor(f: StochMatrix, g: StochMatrix) -> StochMatrix:
    """Kronecker product."""
    return FINSTOCH.tensor(f, g)


def structural(X: Obj) -> dict:
    """Copy, discard, swap and point masses on ``X``."""
    return {
        "copy": FINSTOCH.copy(X),
        "discard": FINSTOCH.discard(X),
        "swap": FINSTOCH.swap(X, X),
        "dirac": lambda x: FINSTOCH.dirac(X, x),
    }


def random_distribution(n: int, d: int, rng: np.random.Generator) -> list[int]:
    """Numerators of a uniformly random weak composition of ``d`` into ``n`` parts."""
    bars = np.sort(rng.choice(d + n - 1, size=n - 1, replace=False)) if n > 1 else np.array([], int)
    cuts = np.concatenate(([-1], bars, [d + n - 1]))
    return [int(c) for c in np.diff(cuts) - 1]


def random_kernel(dom: Obj, cod: Obj, seed, d: int = 6) -> StochMatrix:
    """Random stochastic matrix with rows ``k/d``; ``seed`` is an int or a Generator.

    ``d = 1`` yields deterministic kernels.
    """
    if d < 1:
        raise ValueError("denominator bound must be ≥ 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = size(cod)
    num = np.array([random_distribution(n, d, rng) for _ in range(size(dom))], dtype=np.int64)
    return StochMatrix(dom, cod, num.reshape(size(dom), n), d)


def random_function(dom: Obj, cod: Obj, rng: np.random.Generator) -> StochMatrix:
    return _zero_one(dom, cod, rng.integers(0, size(cod), size=size(dom)))


def from_json(data: dict) -> StochMatrix:
    """Load ``{"dom": [...], "cod": [...], "rows": [["p/q", ...], ...]}``."""
    try:
        dom = Obj((FinSet(tuple(data["dom"])),))
        cod = Obj((FinSet(tuple(data["cod"])),))
        rows = data["rows"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidKernel(f"malformed stochastic matrix: {exc}") from None
    if len(rows) != len(dom.factors[0]) or any(len(r) != len(cod.factors[0]) for r in rows):
        raise InvalidKernel("row/column count does not match dom/cod")
    try:
        return StochMatrix.from_rows(dom, cod, rows)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidKernel(str(exc)) from None
