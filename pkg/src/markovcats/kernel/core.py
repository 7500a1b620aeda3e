"""Objects, morphisms and the interface every category instance implements.

Objects are *words* of atoms: ``X ⊗ Y`` is the concatenation of the atom
tuples and the unit is the empty word.  This makes the monoidal structure
strict, so associators and unitors are identities and never appear in code.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Any, ClassVar, Iterable, Sequence


class MarkovError(Exception):
    """Base class for errors raised by this package."""


class TypeMismatch(MarkovError):
    """Two morphisms do not compose, or an argument has the wrong type."""


class NotDeterministic(MarkovError):
    """A morphism required to be deterministic is not."""


@dataclass(frozen=True)
class Obj:
    """A tensor word of atoms; ``Obj()`` is the monoidal unit."""

    factors: tuple = ()

    def __post_init__(self):
        if not isinstance(self.factors, tuple):
            object.__setattr__(self, "factors", tuple(self.factors))

    @classmethod
    def of(cls, *atoms) -> "Obj":
        return cls(tuple(atoms))

    def __matmul__(self, other: "Obj") -> "Obj":
        if not isinstance(other, Obj):
            return NotImplemented
        return Obj(self.factors + other.factors)

    def __len__(self):
        return len(self.factors)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Obj(self.factors[item])
        return Obj((self.factors[item],))

    def atoms(self) -> list["Obj"]:
        """Single-atom objects, in order."""
        return [Obj((a,)) for a in self.factors]

    def select(self, positions: Iterable[int]) -> "Obj":
        return Obj(tuple(self.factors[i] for i in positions))

    @property
    def is_unit(self) -> bool:
        return not self.factors

    def __repr__(self):
        if not self.factors:
            return "I"
        return " ⊗ ".join(repr(a) for a in self.factors)


UNIT = Obj()


def tensor_objects(objs: Iterable[Obj]) -> Obj:
    return reduce(lambda a, b: a @ b, objs, UNIT)


class Morphism:
    """Base class for arrows; concrete instances subclass it.

    Subclasses set the class attribute ``category`` and define exact
    ``__eq__``.  ``f >> g`` is diagrammatic composition (first ``f``) and
    ``f @ g`` the tensor product.
    """

    category: ClassVar["MarkovCategory"]
    dom: Obj
    cod: Obj

    def then(self, other: "Morphism") -> "Morphism":
        return self.category.compose(self, other)

    def __rshift__(self, other):
        return self.then(other)

    def __matmul__(self, other):
        return self.category.tensor(self, other)

    def to_json(self) -> Any:
        raise NotImplementedError

    __hash__ = None  # type: ignore[assignment]


class MarkovCategory(ABC):
    """A strict Markov category with decidable morphism equality.

    ``compose(f, g)`` is ``g ∘ f``: the first argument acts first.
    """

    name: str = "abstract"
    #: True if the category is known to be causal, False if known not to be.
    causal: bool | None = None

    @abstractmethod
    def identity(self, X: Obj) -> Morphism: ...

    @abstractmethod
    def compose(self, f: Morphism, g: Morphism) -> Morphism: ...

    @abstractmethod
    def tensor(self, f: Morphism, g: Morphism) -> Morphism: ...

    @abstractmethod
    def copy(self, X: Obj) -> Morphism: ...

    @abstractmethod
    def discard(self, X: Obj) -> Morphism: ...

    @abstractmethod
    def swap(self, X: Obj, Y: Obj) -> Morphism: ...

    def equal(self, f: Morphism, g: Morphism) -> bool:
        return f.dom == g.dom and f.cod == g.cod and f == g

    def permute(self, X: Obj, perm: Sequence[int]) -> Morphism:
        """Deterministic reindexing ``X → X'`` with ``X'[k] = X[perm[k]]``.

        The default builds it from adjacent swaps; instances may override
        with a direct construction.
        """
        return permutation_from_swaps(self, X, perm)

    # conveniences built from the primitives

    def compose_all(self, *morphisms: Morphism) -> Morphism:
        return reduce(self.compose, morphisms)

    def tensor_all(self, morphisms: Iterable[Morphism]) -> Morphism:
        morphisms = list(morphisms)
        if not morphisms:
            return self.identity(UNIT)
        return reduce(self.tensor, morphisms)

    def copy_n(self, X: Obj, n: int) -> Morphism:
        """The ``n``-fold copy ``X → X^{⊗n}``; discard for n=0, identity for n=1."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        if n == 0:
            return self.discard(X)
        out = self.identity(X)
        for k in range(1, n):
            # X^{⊗k} → X^{⊗(k+1)} by copying the last factor
            step = self.tensor(self.identity(tensor_objects([X] * (k - 1))), self.copy(X))
            out = self.compose(out, step)
        return out


def permutation_from_swaps(cat: MarkovCategory, X: Obj, perm: Sequence[int]) -> Morphism:
    """Reindexing built only from adjacent ``id ⊗ swap ⊗ id`` morphisms."""
    perm = list(perm)
    n = len(X)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of {n} factors")
    current = list(range(n))  # current[k] = original index at position k
    result = cat.identity(X)
    target = perm
    # bubble sort current into target, recording each adjacent swap
    for k in range(n):
        j = current.index(target[k], k)
        while j > k:
            atoms = [X.factors[i] for i in current]
            left = Obj(tuple(atoms[: j - 1]))
            right = Obj(tuple(atoms[j + 1:]))
            a, b = Obj((atoms[j - 1],)), Obj((atoms[j],))
            step = cat.tensor_all([cat.identity(left), cat.swap(a, b), cat.identity(right)])
            result = cat.compose(result, step)
            current[j - 1], current[j] = current[j], current[j - 1]
            j -= 1
    return result


@dataclass
class CheckReport:
    """Outcome of a verification; a failed report always carries a witness.

    ``hypothesis`` and ``conclusion`` are filled in by implication checks
    (``passed`` is then ``not hypothesis or conclusion``).
    """

    name: str
    passed: bool
    detail: str = ""
    witness: Any = None
    hypothesis: bool | None = None
    conclusion: bool | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.passed and self.witness is None:
            raise ValueError(f"failed report {self.name!r} has no witness")

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "passed": self.passed, "detail": self.detail}
        if self.witness is not None:
            out["witness"] = jsonable(self.witness)
        if self.hypothesis is not None:
            out["hypothesis"] = self.hypothesis
        if self.conclusion is not None:
            out["conclusion"] = self.conclusion
        if self.extra:
            out["extra"] = jsonable(self.extra)
        return out


def jsonable(value: Any) -> Any:
    """Best-effort conversion of witnesses to JSON-compatible data."""
    if isinstance(value, Morphism):
        try:
            return value.to_json()
        except NotImplementedError:
            return repr(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (frozenset, set)):
        return sorted((jsonable(v) for v in value), key=repr)
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, Fraction):
        return str(value)
    return repr(value)
