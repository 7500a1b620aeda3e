"""Execute parsed check scripts."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .. import cringplus, finstoch, projective, setmulti, vietoris
from ..cringplus import PolyRing
from ..finstoch import FinSet
from ..kernel.core import CheckReport, MarkovCategory, MarkovError, Morphism, Obj
from ..kernel.diagram import Gen, Par, Seq, evaluate, resolve
from ..kernel.predicates import (
    as_equal,
    check_causality_triple,
    check_comonoid_laws,
    check_discard_natural,
    check_multiplicativity,
    displays_ci,
    is_deterministic,
)
from .script import CheckDirective, InstanceDecl, MorphismDecl, ObjectDecl, Script, TermDecl

CATEGORIES = {
    "finstoch": finstoch.FINSTOCH,
    "setmulti": setmulti.SETMULTI,
    "vietoris": vietoris.VIETORIS,
    "cring": cringplus.CRING,
}

MORPHISM_LOADERS = {
    "finstoch": finstoch.from_json,
    "setmulti": setmulti.from_json,
    "vietoris": vietoris.map_from_json,
    "cring": cringplus.from_json,
}


def load_object(instance: str, data) -> Obj:
    if instance in ("finstoch", "setmulti"):
        if not isinstance(data, list):
            raise MarkovError("a finite set is a JSON list of labels")
        return Obj((FinSet(tuple(str(x) for x in data)),))
    if instance == "vietoris":
        return Obj((vietoris.space_from_json(data),))
    if instance == "cring":
        if not isinstance(data, list):
            raise MarkovError("a polynomial ring is a JSON list of variable names")
        return Obj((PolyRing(tuple(data)),))
    raise MarkovError(f"unknown instance {instance!r}")


@dataclass
class Environment:
    objects: dict = field(default_factory=dict)       # name -> Obj
    object_data: dict = field(default_factory=dict)   # name -> JSON descriptor
    morphisms: dict = field(default_factory=dict)     # name -> Morphism
    terms: dict = field(default_factory=dict)         # name -> (term, instance)
    broken: dict = field(default_factory=dict)        # name -> error text

    def value(self, term, cat: MarkovCategory) -> Morphism:
        for name in _generators(term):
            if name in self.broken:
                raise MarkovError(f"{name!r} failed to load: {self.broken[name]}")
            if name in self.terms and name not in self.morphisms:
                inner, inst = self.terms[name]
                self.morphisms[name] = self.value(inner, CATEGORIES[inst])
        return evaluate(term, self.morphisms, self.objects, category=cat)


def _generators(term) -> list[str]:
    if isinstance(term, Gen):
        return [term.name]
    if isinstance(term, Seq):
        return _generators(term.first) + _generators(term.second)
    if isinstance(term, Par):
        return _generators(term.left) + _generators(term.right)
    return []


def _substitute(data, env: Environment):
    if isinstance(data, dict):
        data = dict(data)
        for key in ("dom", "cod"):
            if isinstance(data.get(key), str):
                data[key] = env.object_data[data[key]]
    return data


def _run_directive(c: CheckDirective, instance: str, env: Environment) -> CheckReport:
    cat = CATEGORIES[instance]
    a = c.args
    val = lambda t: env.value(t, cat)  # noqa: E731
    d = c.directive
    if d == "comonoid":
        return check_comonoid_laws(cat, resolve(a[0], env.objects))
    if d == "multiplicativity":
        return check_multiplicativity(cat, resolve(a[0], env.objects), resolve(a[1], env.objects))
    if d == "equal":
        f, g = val(a[0]), val(a[1])
        ok = cat.equal(f, g)
        return CheckReport("equal", ok, "both sides agree" if ok else "sides differ",
                           witness=None if ok else {"lhs": f, "rhs": g})
    if d == "deterministic":
        f = val(a[0])
        ok = is_deterministic(f)
        return CheckReport("deterministic", ok, f"{'is' if ok else 'is not'} a comonoid homomorphism",
                           witness=None if ok else {"morphism": f})
    if d == "discard_natural":
        f = val(a[0])
        ok = check_discard_natural(f)
        return CheckReport("discard natural", ok, f"discard ∘ f {'=' if ok else '≠'} discard",
                           witness=None if ok else {"morphism": f})
    if d == "as_equal":
        p, f, g = (val(t) for t in a)
        ok = as_equal(p, f, g)
        return CheckReport("as_equal", ok, f"f and g {'agree' if ok else 'differ'} p-almost surely",
                           witness=None if ok else {"p": p, "f": f, "g": g})
    if d == "ci":
        p = val(a[0])
        split = None if c.over is None else [resolve(o, env.objects) for o in c.over]
        ok = displays_ci(p, split)
        return CheckReport("ci", ok, f"{'displays' if ok else 'does not display'} independence",
                           witness=None if ok else {"p": p})
    if d == "causality":
        return check_causality_triple(*(val(t) for t in a))
    if d == "determinism_lemma":
        return projective.check_determinism_lemma(val(a[0]), val(a[1]))
    if d == "aseq":
        return projective.check_aseq_lemma(*(val(t) for t in a))
    if d == "cring_noncausality":
        return cringplus.check_noncausality(a[0])
    if d == "setmulti_witness":
        return setmulti.nonextension_witness(a[0])[2]
    raise MarkovError(f"unknown directive {d!r}")


def run_directive(c: CheckDirective, instance: str | None, env: Environment) -> CheckReport:
    """Run one directive; errors become failed reports, ``not`` flips the verdict."""
    label = c.label()
    try:
        if instance is None and c.directive not in ("cring_noncausality", "setmulti_witness"):
            raise MarkovError("no instance selected")
        r = _run_directive(c, instance or "finstoch", env)
    except (MarkovError, ValueError, KeyError, TypeError) as exc:
        return CheckReport(label, False, f"error: {exc}",
                           witness={"error": type(exc).__name__, "message": str(exc), "line": c.line})
    if not c.negate:
        return CheckReport(label, r.passed, r.detail, r.witness, r.hypothesis, r.conclusion, r.extra)
    if r.passed:
        return CheckReport(label, False, f"expected a failure but the check passed: {r.detail}",
                           witness={"expected": "failure", "line": c.line}, hypothesis=r.hypothesis,
                           conclusion=r.conclusion, extra=r.extra)
    extra = dict(r.extra)
    extra["expected_failure"] = r.to_dict().get("witness")
    return CheckReport(label, True, f"fails as expected: {r.detail}", None, r.hypothesis,
                       r.conclusion, extra)


def run_checks(script: Script, parallel: bool = False) -> tuple[list[CheckReport], int]:
    """Load declarations in order, then run every directive.

    Returns the reports and the exit code: 0 iff every report passed.
    Loader errors appear as failed ``load`` reports.
    """
    env = Environment()
    reports: list[CheckReport] = []
    pending: list[tuple[CheckDirective, str | None]] = []
    instance = None
    for s in script.statements:
        if isinstance(s, InstanceDecl):
            instance = s.name
        elif isinstance(s, ObjectDecl):
            try:
                env.objects[s.name] = load_object(s.instance, s.data)
                env.object_data[s.name] = s.data
            except (MarkovError, ValueError, KeyError, TypeError) as exc:
                env.broken[s.name] = str(exc)
                reports.append(_load_failure(s, exc))
        elif isinstance(s, MorphismDecl):
            try:
                for key in ("dom", "cod"):
                    ref = s.data.get(key) if isinstance(s.data, dict) else None
                    if isinstance(ref, str) and ref in env.broken:
                        raise MarkovError(f"object {ref!r} failed to load")
                env.morphisms[s.name] = MORPHISM_LOADERS[s.instance](_substitute(s.data, env))
            except (MarkovError, ValueError, KeyError, TypeError, AttributeError) as exc:
                env.broken[s.name] = str(exc)
                reports.append(_load_failure(s, exc))
        elif isinstance(s, TermDecl):
            if instance is None:
                env.broken[s.name] = "no instance selected"
                reports.append(_load_failure(s, MarkovError("no instance selected")))
            else:
                env.terms[s.name] = (s.term, instance)
        else:
            pending.append((s, instance))
    # resolve terms up front so concurrent directives only read the environment
    for name, (term, inst) in env.terms.items():
        if name not in env.morphisms and name not in env.broken:
            try:
                env.morphisms[name] = env.value(term, CATEGORIES[inst])
            except (MarkovError, ValueError, KeyError, TypeError) as exc:
                env.broken[name] = str(exc)
                reports.append(CheckReport(f"let {name}", False, f"error: {exc}",
                                           witness={"error": type(exc).__name__, "message": str(exc)}))
    if parallel and len(pending) > 1:
        with ThreadPoolExecutor() as pool:
            reports += list(pool.map(lambda ci: run_directive(ci[0], ci[1], env), pending))
    else:
        reports += [run_directive(c, inst, env) for c, inst in pending]
    return reports, 0 if all(r.passed for r in reports) else 1


def _load_failure(s, exc) -> CheckReport:
    kind = "object" if isinstance(s, ObjectDecl) else "morphism" if isinstance(s, MorphismDecl) else "let"
    return CheckReport(f"load {kind} {s.name}", False, f"line {s.line}: {exc}",
                       witness={"error": type(exc).__name__, "message": str(exc), "line": s.line})
