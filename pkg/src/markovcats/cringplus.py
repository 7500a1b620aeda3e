"""The opposite of commutative rings with additive unital maps, on sparse
integer polynomial rings.

A morphism ``X → Y`` is represented by an additive, unit-preserving map
``R_Y → R_X`` given by its values on monomials.  Tensor words of rings
are polynomial rings on the concatenated variables; copy is represented
by multiplication and discard by the unit inclusion ``ℤ → R``.

Equality of two rules is checked extensionally on all monomials of total
degree at most the current degree bound (default 12), so every equality
here means "verified up to degree D".
"""

from __future__ import annotations

import contextlib
import itertools
import re
from contextvars import ContextVar
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from .kernel.core import CheckReport, MarkovCategory, MarkovError, Morphism, Obj, TypeMismatch
from .kernel.predicates import check_causality_triple, is_deterministic

DEFAULT_DEGREE_BOUND = 12
_degree_bound: ContextVar[int] = ContextVar("degree_bound", default=DEFAULT_DEGREE_BOUND)


class RingMismatch(MarkovError):
    pass


@contextlib.contextmanager
def degree_bound(D: int):
    """Temporarily change the degree up to which rule equality is checked."""
    token = _degree_bound.set(D)
    try:
        yield
    finally:
        _degree_bound.reset(token)


def current_degree_bound() -> int:
    return _degree_bound.get()


@dataclass(frozen=True)
class PolyRing:
    variables: tuple = ("t",)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")

    def __repr__(self):
        return "ℤ[" + ",".join(self.variables) + "]"


ZT = Obj((PolyRing(("t",)),))


def nvars(X: Obj) -> int:
    return sum(len(a.variables) for a in X.factors)


def variable_names(X: Obj) -> list[str]:
    """Fresh names for the variables of a word ring; suffixed only when needed."""
    if len(X) == 1:
        return list(X.factors[0].variables)
    return [f"{v}_{k}" for k, a in enumerate(X.factors) for v in a.variables]


class Poly:
    """Sparse integer polynomial: ``{exponent tuple: nonzero coefficient}``."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        self.n = n
        clean = {}
        for m, c in (terms or {}).items():
            if len(m) != n or any(e < 0 for e in m):
                raise ValueError(f"bad monomial {m} for {n} variables")
            if c:
                clean[tuple(m)] = clean.get(tuple(m), 0) + int(c)
        self.terms = {m: c for m, c in clean.items() if c}

    @classmethod
    def one(cls, n: int) -> "Poly":
        return cls(n, {(0,) * n: 1})

    @classmethod
    def monomial(cls, m: tuple, coeff: int = 1) -> "Poly":
        return cls(len(m), {m: coeff})

    def __add__(self, other: "Poly") -> "Poly":
        self._same(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(self.n, out)

    def __neg__(self):
        return Poly(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return Poly(self.n, {m: c * other for m, c in self.terms.items()})
        self._same(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(self.n, out)

    __rmul__ = __mul__

    def tensor(self, other: "Poly") -> "Poly":
        """Elementary tensor in the ring on the concatenated variables."""
        return Poly(self.n + other.n, {m1 + m2: c1 * c2 for m1, c1 in self.terms.items()
                                       for m2, c2 in other.terms.items()})

    def _same(self, other):
        if self.n != other.n:
            raise RingMismatch(f"polynomials in {self.n} and {other.n} variables")

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.one(self.n) * other
        if not isinstance(other, Poly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def format(self, names=None) -> str:
        names = names or ([f"x{i}" for i in range(self.n)] if self.n != 1 else ["t"])
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, reverse=True):
            c = self.terms[m]
            factors = [v if e == 1 else f"{v}^{e}" for v, e in zip(names, m) if e]
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return self.format()


_TERM = re.compile(r"\s*([+-]?)\s*([^+-]+)")


def parse_poly(text: str, names: list[str]) -> Poly:
    """Parse e.g. ``"3*t^2*u - t + 1"`` over the given variable names."""
    n = len(names)
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial")
    out = Poly(n)
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial {text!r} at {pos}")
        sign = -1 if m.group(1) == "-" else 1
        coeff, exps = 1, [0] * n
        for factor in m.group(2).split("*"):
            factor = factor.strip()
            if re.fullmatch(r"\d+", factor):
                coeff *= int(factor)
                continue
            var, _, power = factor.partition("^")
            var = var.strip()
            if var not in names:
                raise ValueError(f"unknown variable {var!r} in {text!r}")
            exps[names.index(var)] += int(power) if power else 1
        out = out + Poly(n, {tuple(exps): sign * coeff})
        pos = m.end()
    return out


@lru_cache(maxsize=512)
def monomials(n: int, D: int) -> tuple[tuple, ...]:
    """All exponent tuples in ``n`` variables of total degree ≤ D."""
    if n == 0:
        return ((),)
    out = []
    for total in range(D + 1):
        for bars in itertools.combinations(range(total + n - 1), n - 1):
            cuts = (-1,) + bars + (total + n - 1,)
            out.append(tuple(cuts[i + 1] - cuts[i] - 1 for i in range(n)))
    return tuple(out)


class AdditiveMap(Morphism):
    """Morphism ``dom → cod`` represented by the additive map ``R_cod → R_dom``.

    ``rule`` sends an exponent tuple of ``R_cod`` to a :class:`Poly` over
    ``R_dom``; values are cached.
    """

    __slots__ = ("dom", "cod", "rule", "label")

    def __init__(self, dom: Obj, cod: Obj, rule: Callable[[tuple], Poly], label: str = ""):
        self.dom, self.cod, self.label = dom, cod, label
        self.rule = lru_cache(maxsize=None)(rule)
        unit = self.rule((0,) * nvars(cod))
        if unit != Poly.one(nvars(dom)):
            raise MarkovError(f"{label or 'map'} does not preserve the unit (1 ↦ {unit})")

    def apply(self, p: Poly) -> Poly:
        """The representing map on a polynomial over ``R_cod``."""
        if p.n != nvars(self.cod):
            raise RingMismatch(f"polynomial in {p.n} variables, map expects {nvars(self.cod)}")
        out = Poly(nvars(self.dom))
        for m, c in p.terms.items():
            out = out + self.rule(m) * c
        return out

    def __call__(self, p: Poly) -> Poly:
        return self.apply(p)

    def equal_up_to(self, other: "AdditiveMap", D: int) -> bool:
        if self.dom != other.dom or self.cod != other.cod:
            return False
        return all(self.rule(m) == other.rule(m) for m in monomials(nvars(self.cod), D))

    def __eq__(self, other):
        if not isinstance(other, AdditiveMap):
            return NotImplemented
        return self.equal_up_to(other, current_degree_bound())

    def is_multiplicative(self, D: int = 6) -> bool:
        """Ring-homomorphism spot check on monomial pairs of degree ≤ D."""
        mons = monomials(nvars(self.cod), D)
        for a in mons:
            for b in mons:
                ab = tuple(x + y for x, y in zip(a, b))
                if self.rule(ab) != self.rule(a) * self.rule(b):
                    return False
        return True

    def __repr__(self):
        names = variable_names(self.cod)
        sample = ", ".join(
            f"{Poly.monomial(m).format(names)}↦{self.rule(m).format(variable_names(self.dom))}"
            for m in monomials(nvars(self.cod), 2)[:6])
        return f"AdditiveMap[{self.label}]({self.dom!r} → {self.cod!r}: {sample}, …)"

    def to_json(self) -> dict:
        D = min(current_degree_bound(), 4)
        names = variable_names(self.cod)
        return {
            "label": self.label,
            "dom": [list(a.variables) for a in self.dom.factors],
            "cod": [list(a.variables) for a in self.cod.factors],
            "table": {Poly.monomial(m).format(names): self.rule(m).format(variable_names(self.dom))
                      for m in monomials(nvars(self.cod), D)},
        }


def _split(m: tuple, sizes: list[int]) -> list[tuple]:
    out, k = [], 0
    for s in sizes:
        out.append(m[k:k + s])
        k += s
    return out


class CRingPlusOp(MarkovCategory):
    name = "cringplus"
    causal = False

    def identity(self, X: Obj) -> AdditiveMap:
        return AdditiveMap(X, X, Poly.monomial, "id")

    def compose(self, f: AdditiveMap, g: AdditiveMap) -> AdditiveMap:
        if f.cod != g.dom:
            raise TypeMismatch(f"cannot compose {f.dom!r}→{f.cod!r} with {g.dom!r}→{g.cod!r}")
        return AdditiveMap(f.dom, g.cod, lambda m: f.apply(g.rule(m)), f"{g.label}∘{f.label}")

    def tensor(self, f: AdditiveMap, g: AdditiveMap) -> AdditiveMap:
        k = nvars(f.cod)
        return AdditiveMap(f.dom @ g.dom, f.cod @ g.cod,
                           lambda m: f.rule(m[:k]).tensor(g.rule(m[k:])), f"{f.label}⊗{g.label}")

    def copy(self, X: Obj) -> AdditiveMap:
        k = nvars(X)
        return AdditiveMap(X, X @ X, lambda m: Poly.monomial(tuple(a + b for a, b in zip(m[:k], m[k:]))),
                           "copy")

    def discard(self, X: Obj) -> AdditiveMap:
        n = nvars(X)
        return AdditiveMap(X, Obj(), lambda m: Poly.one(n), "discard")

    def swap(self, X: Obj, Y: Obj) -> AdditiveMap:
        n = len(X)
        return self.permute(X @ Y, list(range(n, n + len(Y))) + list(range(n)))

    def permute(self, X: Obj, perm) -> AdditiveMap:
        perm = list(perm)
        if sorted(perm) != list(range(len(X))):
            raise ValueError(f"{perm} is not a permutation of {len(X)} factors")
        target = X.select(perm)
        sizes_t = [len(a.variables) for a in target.factors]

        def rule(m):
            blocks = _split(m, sizes_t)
            placed = [None] * len(perm)
            for k, src in enumerate(perm):
                placed[src] = blocks[k]
            return Poly.monomial(tuple(e for b in placed for e in b))
        return AdditiveMap(X, target, rule, "perm")

    def from_rule(self, dom: Obj, cod: Obj, rule, label="") -> AdditiveMap:
        return AdditiveMap(dom, cod, rule, label)


CRING = CRingPlusOp()
AdditiveMap.category = CRING


def apply(m: AdditiveMap, p: Poly) -> Poly:
    return m.apply(p)


def compose_op(a: AdditiveMap, b: AdditiveMap) -> AdditiveMap:
    """Composite ``a`` then ``b`` in the opposite category.

    Its representing map is ``a_rep ∘ b_rep``: apply ``b`` first.
    """
    return CRING.compose(a, b)


def structural(R: Obj) -> dict:
    return {
        "copy": CRING.copy(R),
        "discard": CRING.discard(R),
        "swap": CRING.swap(R, R),
        "tensor": CRING.tensor,
    }


def t_power(n: int) -> Poly:
    return Poly.monomial((n,))


def _zt_rule(fn):
    return lambda m: Poly.monomial((fn(m[0]),))


def builtin_maps() -> dict[str, AdditiveMap]:
    """The four endomorphisms of ℤ[t] used in the non-causality example."""
    return {
        "f": AdditiveMap(ZT, ZT, _zt_rule(lambda n: n - 1 if n >= 1 else 0), "f"),
        "g": AdditiveMap(ZT, ZT, _zt_rule(lambda n: 1 if n >= 1 else 0), "g"),
        "h1": AdditiveMap(ZT, ZT, _zt_rule(lambda n: n), "h1"),
        "h2": AdditiveMap(ZT, ZT, _zt_rule(lambda n: 0), "h2"),
    }


def ring_hom(dom: Obj, cod: Obj, images: list[Poly], label="hom") -> AdditiveMap:
    """Representing map sends the i-th variable of ``R_cod`` to ``images[i]``."""
    if len(images) != nvars(cod):
        raise RingMismatch("one image per variable of the codomain ring")

    def rule(m):
        out = Poly.one(nvars(dom))
        for img, e in zip(images, m):
            for _ in range(e):
                out = out * img
        return out
    return AdditiveMap(dom, cod, rule, label)


def check_noncausality(D: int = 12) -> CheckReport:
    """Reproduce the failure of causality on ℤ[t].

    Hypothesis: ``(fg)(h_i(t^n) t^m) = 1`` for both ``i`` and all
    ``n, m ≤ D``.  Conclusion failure at ``n = ℓ = 1, m = 0``:
    ``f(g(h1(t)) t) = t`` but ``f(g(h2(t)) t) = 1``.  The generic kernel
    checker, run with the same degree bound, must agree.
    """
    if D < 2:
        raise ValueError("D must be ≥ 2")
    maps = builtin_maps()
    f, g, h1, h2 = (maps[k] for k in ("f", "g", "h1", "h2"))
    one = Poly.one(1)
    fg = lambda p: f.apply(g.apply(p))  # noqa: E731
    bad = [(n, m, i) for n in range(D + 1) for m in range(D + 1)
           for i, h in ((1, h1), (2, h2)) if fg(h.apply(t_power(n)) * t_power(m)) != one]
    hypothesis = not bad
    t = t_power(1)
    v1 = f.apply(g.apply(h1.apply(t) * one) * t)
    v2 = f.apply(g.apply(h2.apply(t) * one) * t)
    conclusion_fails = v1 != v2
    with degree_bound(D):
        generic = check_causality_triple(f, g, h1, h2)
    agrees = generic.hypothesis == hypothesis and generic.conclusion == (not conclusion_fails)
    passed = hypothesis and conclusion_fails and agrees
    detail = (f"hypothesis {'verified' if hypothesis else 'FAILED'} for n,m ≤ {D}; "
              f"at (n,m,l)=(1,0,1): {v1.format()} vs {v2.format()}; "
              f"generic checker hypothesis={generic.hypothesis} conclusion={generic.conclusion}")
    witness = None if passed else {"hypothesis_failures": bad[:5], "values": [v1.format(), v2.format()]}
    return CheckReport("cring non-causality", passed, detail, witness=witness,
                       hypothesis=hypothesis, conclusion=not conclusion_fails,
                       extra={"D": D, "lhs": v1.format(), "rhs": v2.format(),
                              "generic_agrees": agrees})


def deterministic_crosscheck(m: AdditiveMap, D: int = 6) -> bool:
    """Kernel determinism agrees with multiplicativity on the monomial grid."""
    with degree_bound(D):
        return is_deterministic(m) == m.is_multiplicative(D)


def from_json(data: dict) -> AdditiveMap:
    """Load ``{"builtin": name}`` or a table map.

    Table form: ``{"dom": ["t"], "cod": ["t"], "table": {"t^2": "t"},
    "default": "identity"|"one"|"zero"}`` with variable lists naming a single
    ring each; monomials absent from the table follow the default clause.
    """
    if "builtin" in data:
        maps = builtin_maps()
        if data["builtin"] not in maps:
            raise MarkovError(f"unknown builtin map {data['builtin']!r}")
        return maps[data["builtin"]]
    dom = Obj((PolyRing(tuple(data["dom"])),))
    cod = Obj((PolyRing(tuple(data["cod"])),))
    dn, cn = variable_names(dom), variable_names(cod)
    table = {}
    for k, v in data.get("table", {}).items():
        key = parse_poly(k, cn)
        if len(key.terms) != 1 or list(key.terms.values()) != [1]:
            raise MarkovError(f"table key {k!r} is not a monomial")
        table[next(iter(key.terms))] = parse_poly(v, dn)
    default = data.get("default", "zero")
    if default == "identity" and dn != cn:
        raise MarkovError("identity default needs equal variable lists")

    def rule(m):
        if m in table:
            return table[m]
        if not any(m):
            return Poly.one(len(dn))
        if default == "identity":
            return Poly.monomial(m)
        if default == "one":
            return Poly.one(len(dn))
        if default == "zero":
            return Poly(len(dn))
        raise MarkovError(f"unknown default clause {default!r}")
    return AdditiveMap(dom, cod, rule, data.get("label", "table"))
