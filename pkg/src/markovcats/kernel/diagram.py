"""String-diagram terms, typechecking and evaluation.

Object positions in a term hold either an :class:`Obj` or an object
*expression*: a tuple of names looked up in an object table (the empty
tuple is the unit).  JSON serialization requires the named form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .core import MarkovCategory, MarkovError, Morphism, Obj, tensor_objects

ObjRef = Union[Obj, tuple]


class UnboundGenerator(MarkovError):
    def __init__(self, name: str):
        super().__init__(f"generator {name!r} is not bound")
        self.name = name


class UnboundObject(MarkovError):
    def __init__(self, name: str):
        super().__init__(f"object {name!r} is not declared")
        self.name = name


class DomainMismatch(MarkovError):
    def __init__(self, term: "Term", left: Obj, right: Obj):
        super().__init__(f"in {term}: codomain {left!r} does not match domain {right!r}")
        self.term = term


class Term:
    """Base class of diagram terms."""


@dataclass(frozen=True)
class Id(Term):
    obj: ObjRef

    def __str__(self):
        return f"id({_fmt_obj(self.obj)})"


@dataclass(frozen=True)
class Gen(Term):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Seq(Term):
    first: Term
    second: Term

    def __str__(self):
        return f"seq({self.first}, {self.second})"


@dataclass(frozen=True)
class Par(Term):
    left: Term
    right: Term

    def __str__(self):
        return f"par({self.left}, {self.right})"


@dataclass(frozen=True)
class Swap(Term):
    a: ObjRef
    b: ObjRef

    def __str__(self):
        return f"swap({_fmt_obj(self.a)}, {_fmt_obj(self.b)})"


@dataclass(frozen=True)
class Copy(Term):
    obj: ObjRef

    def __str__(self):
        return f"copy({_fmt_obj(self.obj)})"


@dataclass(frozen=True)
class Discard(Term):
    obj: ObjRef

    def __str__(self):
        return f"discard({_fmt_obj(self.obj)})"


def _fmt_obj(ref: ObjRef) -> str:
    if isinstance(ref, Obj):
        return repr(ref)
    return "*".join(ref) if ref else "I"


def resolve(ref: ObjRef, objects: Mapping[str, Obj] | None) -> Obj:
    if isinstance(ref, Obj):
        return ref
    objects = objects or {}
    for name in ref:
        if name not in objects:
            raise UnboundObject(name)
    return tensor_objects(objects[n] for n in ref)


def typecheck(term: Term, env: Mapping[str, Morphism], objects: Mapping[str, Obj] | None = None) -> tuple[Obj, Obj]:
    """Infer ``(dom, cod)`` of ``term``, syntax-directed."""
    if isinstance(term, Gen):
        if term.name not in env:
            raise UnboundGenerator(term.name)
        m = env[term.name]
        return m.dom, m.cod
    if isinstance(term, Id):
        X = resolve(term.obj, objects)
        return X, X
    if isinstance(term, Copy):
        X = resolve(term.obj, objects)
        return X, X @ X
    if isinstance(term, Discard):
        return resolve(term.obj, objects), Obj()
    if isinstance(term, Swap):
        A, B = resolve(term.a, objects), resolve(term.b, objects)
        return A @ B, B @ A
    if isinstance(term, Seq):
        d1, c1 = typecheck(term.first, env, objects)
        d2, c2 = typecheck(term.second, env, objects)
        if c1 != d2:
            raise DomainMismatch(term, c1, d2)
        return d1, c2
    if isinstance(term, Par):
        d1, c1 = typecheck(term.left, env, objects)
        d2, c2 = typecheck(term.right, env, objects)
        return d1 @ d2, c1 @ c2
    raise TypeError(f"not a diagram term: {term!r}")


def evaluate(
    term: Term,
    env: Mapping[str, Morphism],
    objects: Mapping[str, Obj] | None = None,
    category: MarkovCategory | None = None,
) -> Morphism:
    """Interpret ``term`` compositionally in the category of ``env``."""
    typecheck(term, env, objects)
    if category is None:
        cats = {m.category for m in env.values()}
        if len(cats) != 1:
            raise MarkovError("cannot infer a unique category; pass category=")
        category = cats.pop()
    return _eval(term, env, objects, category)


def _eval(term, env, objects, cat: MarkovCategory) -> Morphism:
    if isinstance(term, Gen):
        return env[term.name]
    if isinstance(term, Id):
        return cat.identity(resolve(term.obj, objects))
    if isinstance(term, Copy):
        return cat.copy(resolve(term.obj, objects))
    if isinstance(term, Discard):
        return cat.discard(resolve(term.obj, objects))
    if isinstance(term, Swap):
        return cat.swap(resolve(term.a, objects), resolve(term.b, objects))
    if isinstance(term, Seq):
        return cat.compose(_eval(term.first, env, objects, cat), _eval(term.second, env, objects, cat))
    if isinstance(term, Par):
        return cat.tensor(_eval(term.left, env, objects, cat), _eval(term.right, env, objects, cat))
    raise TypeError(f"not a diagram term: {term!r}")


# JSON AST: {"tag": "seq", "args": [...]}, objects as lists of names.

def term_to_json(term: Term) -> dict:
    def obj(ref):
        if isinstance(ref, Obj):
            raise ValueError("only named object references can be serialized")
        return list(ref)

    if isinstance(term, Gen):
        return {"tag": "gen", "name": term.name}
    if isinstance(term, Id):
        return {"tag": "id", "obj": obj(term.obj)}
    if isinstance(term, Copy):
        return {"tag": "copy", "obj": obj(term.obj)}
    if isinstance(term, Discard):
        return {"tag": "discard", "obj": obj(term.obj)}
    if isinstance(term, Swap):
        return {"tag": "swap", "args": [obj(term.a), obj(term.b)]}
    if isinstance(term, Seq):
        return {"tag": "seq", "args": [term_to_json(term.first), term_to_json(term.second)]}
    if isinstance(term, Par):
        return {"tag": "par", "args": [term_to_json(term.left), term_to_json(term.right)]}
    raise TypeError(f"not a diagram term: {term!r}")


def term_from_json(data: dict) -> Term:
    tag = data.get("tag")
    if tag == "gen":
        return Gen(data["name"])
    if tag in ("id", "copy", "discard"):
        ref = tuple(data["obj"])
        return {"id": Id, "copy": Copy, "discard": Discard}[tag](ref)
    if tag == "swap":
        a, b = data["args"]
        return Swap(tuple(a), tuple(b))
    if tag in ("seq", "par"):
        a, b = data["args"]
        cls = Seq if tag == "seq" else Par
        return cls(term_from_json(a), term_from_json(b))
    raise ValueError(f"unknown term tag {tag!r}")
