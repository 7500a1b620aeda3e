"""Category-agnostic predicates: comonoid laws, determinism, a.s.-equality,
conditional independence, marginalization and causality.

Everything here is written once against :class:`MarkovCategory` and
evaluates both sides of each equation exactly.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .core import (
    CheckReport,
    MarkovCategory,
    Morphism,
    Obj,
    TypeMismatch,
    tensor_objects,
)


def _cat(f: Morphism) -> MarkovCategory:
    return f.category


def check_comonoid_laws(cat: MarkovCategory, X: Obj) -> CheckReport:
    """Coassociativity, both counit laws and cocommutativity of ``copy_X``."""
    cp, dc, i = cat.copy(X), cat.discard(X), cat.identity(X)
    laws = {
        "coassociativity": (
            cat.compose(cp, cat.tensor(cp, i)),
            cat.compose(cp, cat.tensor(i, cp)),
        ),
        "left counitality": (cat.compose(cp, cat.tensor(dc, i)), i),
        "right counitality": (cat.compose(cp, cat.tensor(i, dc)), i),
        "cocommutativity": (cat.compose(cp, cat.swap(X, X)), cp),
    }
    for law, (lhs, rhs) in laws.items():
        if not cat.equal(lhs, rhs):
            return CheckReport("comonoid laws", False, f"{law} fails on {X!r}",
                               witness={"law": law, "lhs": lhs, "rhs": rhs})
    return CheckReport("comonoid laws", True, f"all four laws hold on {X!r}")


def check_multiplicativity(cat: MarkovCategory, X: Obj, Y: Obj) -> CheckReport:
    """``copy_{X⊗Y} = (id ⊗ swap ⊗ id) ∘ (copy_X ⊗ copy_Y)``."""
    lhs = cat.copy(X @ Y)
    middle = cat.tensor_all([cat.identity(X), cat.swap(X, Y), cat.identity(Y)])
    rhs = cat.compose(cat.tensor(cat.copy(X), cat.copy(Y)), middle)
    if cat.equal(lhs, rhs):
        return CheckReport("multiplicativity", True, f"holds for {X!r}, {Y!r}")
    return CheckReport("multiplicativity", False, f"fails for {X!r}, {Y!r}",
                       witness={"lhs": lhs, "rhs": rhs})


def check_discard_natural(f: Morphism) -> bool:
    """Terminality of the unit: ``discard ∘ f = discard``."""
    cat = _cat(f)
    return cat.equal(cat.compose(f, cat.discard(f.cod)), cat.discard(f.dom))


def is_deterministic(f: Morphism) -> bool:
    """True iff ``copy ∘ f = (f ⊗ f) ∘ copy``."""
    cat = _cat(f)
    lhs = cat.compose(f, cat.copy(f.cod))
    rhs = cat.compose(cat.copy(f.dom), cat.tensor(f, f))
    return cat.equal(lhs, rhs)


def as_equal(p: Morphism, f: Morphism, g: Morphism) -> bool:
    """``f =_{p-a.s.} g``: ``(id ⊗ f) ∘ copy ∘ p = (id ⊗ g) ∘ copy ∘ p``."""
    if p.cod != f.dom or f.dom != g.dom or f.cod != g.cod:
        raise TypeMismatch("as_equal needs p: A → X and f, g: X → Y")
    cat = _cat(p)
    X = p.cod
    base = cat.compose(p, cat.copy(X))
    return cat.equal(
        cat.compose(base, cat.tensor(cat.identity(X), f)),
        cat.compose(base, cat.tensor(cat.identity(X), g)),
    )


def _block_positions(cod: Obj, split: Sequence[Obj] | None) -> list[list[int]]:
    if split is None:
        return [[k] for k in range(len(cod))]
    if tensor_objects(split) != cod:
        raise TypeMismatch(f"split {list(split)!r} does not tensor to {cod!r}")
    out, start = [], 0
    for block in split:
        out.append(list(range(start, start + len(block))))
        start += len(block)
    return out


def marginalize(f: Morphism, keep: Iterable[int], split: Sequence[Obj] | None = None) -> Morphism:
    """Keep the blocks ``keep`` (indices into ``split``, default atoms) of ``cod f``.

    Kept blocks stay in their original order; the rest are discarded.
    """
    cat = _cat(f)
    blocks = _block_positions(f.cod, split)
    keep = set(keep)
    if not keep <= set(range(len(blocks))):
        raise IndexError(f"keep {sorted(keep)} not within {len(blocks)} factors")
    if len(keep) == len(blocks):
        return f
    parts = []
    for b, positions in enumerate(blocks):
        obj = f.cod.select(positions)
        parts.append(cat.identity(obj) if b in keep else cat.discard(obj))
    return cat.compose(f, cat.tensor_all(parts))


def displays_ci(p: Morphism, split: Sequence[Obj] | None = None) -> bool:
    """Whether ``p`` equals the copy of its domain followed by the tensor of
    its single-block marginals.  A split into one block holds trivially."""
    cat = _cat(p)
    blocks = _block_positions(p.cod, split)
    n = len(blocks)
    if n <= 1:
        return True
    split = [p.cod.select(b) for b in blocks]
    marginals = [marginalize(p, [k], split) for k in range(n)]
    rhs = cat.compose(cat.copy_n(p.dom, n), cat.tensor_all(marginals))
    return cat.equal(p, rhs)


def displays_ci_partition(p: Morphism, blocks: Sequence[Sequence[int]]) -> bool:
    """CI for an arbitrary partition of the codomain's atom positions.

    The codomain is permuted so that the blocks become contiguous; this is
    legitimate because CI does not depend on the order of tensor factors.
    """
    order = [i for b in blocks for i in b]
    if sorted(order) != list(range(len(p.cod))):
        raise TypeMismatch(f"{blocks} is not a partition of {len(p.cod)} positions")
    cat = _cat(p)
    q = cat.compose(p, cat.permute(p.cod, order)) if order != sorted(order) else p
    return displays_ci(q, [p.cod.select(b) for b in blocks])


def permute_factors(f: Morphism, order: Sequence[int]) -> Morphism:
    """Post-compose with the reindexing whose k-th output is factor ``order[k]``."""
    cat = _cat(f)
    if list(order) == list(range(len(f.cod))):
        return f
    return cat.compose(f, cat.permute(f.cod, order))


def causality_sides(f: Morphism, g: Morphism, h: Morphism) -> tuple[Morphism, Morphism]:
    """The hypothesis composite ``A → Y ⊗ Z`` and conclusion composite
    ``A → X ⊗ Y ⊗ Z`` of the causality axiom for one choice of ``h``."""
    cat = _cat(f)
    X, Y = f.cod, g.cod
    hyp = cat.compose_all(f, g, cat.copy(Y), cat.tensor(cat.identity(Y), h))
    concl = cat.compose_all(
        f,
        cat.copy(X),
        cat.tensor(cat.identity(X), g),
        cat.tensor(cat.identity(X), cat.copy(Y)),
        cat.tensor(cat.identity(X @ Y), h),
    )
    return hyp, concl


def check_causality_triple(f: Morphism, g: Morphism, h1: Morphism, h2: Morphism) -> CheckReport:
    """Evaluate the causality hypothesis and conclusion for ``f, g, h1, h2``.

    ``passed`` means the implication hypothesis ⇒ conclusion is not violated.
    """
    if f.cod != g.dom or g.cod != h1.dom or h1.dom != h2.dom or h1.cod != h2.cod:
        raise TypeMismatch("causality needs f: A→X, g: X→Y, h1, h2: Y→Z")
    cat = _cat(f)
    hyp1, concl1 = causality_sides(f, g, h1)
    hyp2, concl2 = causality_sides(f, g, h2)
    hypothesis = cat.equal(hyp1, hyp2)
    conclusion = cat.equal(concl1, concl2)
    passed = not hypothesis or conclusion
    witness = None if passed else {"f": f, "g": g, "h1": h1, "h2": h2}
    return CheckReport(
        "causality", passed,
        f"hypothesis {'holds' if hypothesis else 'fails'}, "
        f"conclusion {'holds' if conclusion else 'fails'}",
        witness=witness, hypothesis=hypothesis, conclusion=conclusion,
    )
