"""Check scripts: a line-oriented language binding objects, morphisms and
diagram terms, followed by check directives.

Grammar (EBNF; JSON values may span lines, ``#`` starts a comment)::

    script    = { [ statement ] [ comment ] newline } ;
    statement = "instance" name
              | "object" name "=" json
              | "morphism" name "=" json
              | "let" name "=" term
              | "check" [ "not" ] directive [ arg { "," arg } ] [ "over" obj { "," obj } ] ;
    term      = name
              | ( "id" | "copy" | "discard" ) "(" obj ")"
              | "swap" "(" obj "," obj ")"
              | ( "seq" | "par" ) "(" term "," term ")" ;
    obj       = "I" | name { "*" name } ;
    arg       = integer | term ;
    name      = letter { letter | digit | "_" | "'" } ;

Instances are ``finstoch``, ``setmulti``, ``vietoris`` and ``cring``.
Object JSON: a label list (``finstoch``/``setmulti``), a space
``{"points": [...], "opens": [...]}`` (``vietoris``) or a variable list
(``cring``).  Morphism JSON follows each instance's loader; inside it
``"dom"``/``"cod"`` may name a declared object.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from ..kernel.core import MarkovError
from ..kernel.diagram import Copy, Discard, Gen, Id, Par, Seq, Swap, Term, UnboundGenerator, UnboundObject

INSTANCES = ("finstoch", "setmulti", "vietoris", "cring")

# directive name -> argument kinds: "obj", "term", "int"
DIRECTIVES = {
    "comonoid": ("obj",),
    "multiplicativity": ("obj", "obj"),
    "equal": ("term", "term"),
    "deterministic": ("term",),
    "discard_natural": ("term",),
    "as_equal": ("term", "term", "term"),
    "ci": ("term",),
    "causality": ("term", "term", "term", "term"),
    "determinism_lemma": ("term", "term"),
    "aseq": ("term", "term", "term"),
    "cring_noncausality": ("int",),
    "setmulti_witness": ("int",),
}

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_INT = re.compile(r"-?\d+")
_TERM_HEADS = {"id": Id, "copy": Copy, "discard": Discard}
_RESERVED = set(INSTANCES) | {"I", "id", "copy", "discard", "swap", "seq", "par", "not", "over"}


class ScriptError(MarkovError):
    """Syntax or name-resolution error, with a 1-based position."""

    def __init__(self, message: str, line: int, column: int):
        MarkovError.__init__(self, f"line {line}, column {column}: {message}")
        self.message, self.line, self.column = message, line, column


class ScriptUnboundGenerator(ScriptError, UnboundGenerator):
    def __init__(self, name: str, line: int, column: int):
        ScriptError.__init__(self, f"generator {name!r} is not bound", line, column)
        self.name = name


class ScriptUnboundObject(ScriptError, UnboundObject):
    def __init__(self, name: str, line: int, column: int):
        ScriptError.__init__(self, f"object {name!r} is not declared", line, column)
        self.name = name


@dataclass(frozen=True)
class InstanceDecl:
    name: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ObjectDecl:
    name: str
    instance: str
    data: object
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class MorphismDecl:
    name: str
    instance: str
    data: object
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class TermDecl:
    name: str
    term: Term
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class CheckDirective:
    directive: str
    args: tuple
    negate: bool = False
    over: tuple | None = None
    line: int = field(default=0, compare=False)

    def label(self) -> str:
        return _emit_check(self)


@dataclass(frozen=True)
class Script:
    statements: tuple = ()

    @property
    def checks(self) -> list[CheckDirective]:
        return [s for s in self.statements if isinstance(s, CheckDirective)]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.instance: str | None = None
        self.objects: set[str] = set()
        self.generators: set[str] = set()

    # positions

    def where(self, pos: int | None = None) -> tuple[int, int]:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, message: str, pos: int | None = None) -> ScriptError:
        return ScriptError(message, *self.where(pos))

    def unbound(self, cls, name: str, pos: int) -> ScriptError:
        return cls(name, *self.where(pos))

    # lexing helpers

    def skip_inline(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r":
            self.pos += 1
        if self.pos < len(self.text) and self.text[self.pos] == "#":
            while self.pos < len(self.text) and self.text[self.pos] != "\n":
                self.pos += 1

    def skip_blank(self):
        while True:
            self.skip_inline()
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.pos += 1
            else:
                return

    def peek(self, s: str) -> bool:
        self.skip_inline()
        return self.text.startswith(s, self.pos)

    def expect(self, s: str):
        if not self.peek(s):
            found = self.text[self.pos:self.pos + 1] or "end of input"
            raise self.error(f"expected {s!r}, found {found!r}")
        self.pos += len(s)

    def name(self, what: str = "name") -> str:
        self.skip_inline()
        m = _NAME.match(self.text, self.pos)
        if not m:
            raise self.error(f"expected {what}")
        self.pos = m.end()
        return m.group()

    def json_value(self):
        self.skip_blank()
        try:
            value, end = json.JSONDecoder().raw_decode(self.text, self.pos)
        except json.JSONDecodeError as exc:
            raise self.error(f"invalid JSON: {exc.msg}", exc.pos) from None
        self.pos = end
        return value

    def end_of_statement(self):
        self.skip_inline()
        if self.pos < len(self.text) and self.text[self.pos] != "\n":
            raise self.error(f"unexpected {self.text[self.pos]!r}")

    # grammar

    def script(self) -> Script:
        out = []
        while True:
            self.skip_blank()
            if self.pos >= len(self.text):
                return Script(tuple(out))
            out.append(self.statement())
            self.end_of_statement()

    def statement(self):
        start = self.pos
        line = self.where(start)[0]
        kw = self.name("statement keyword")
        if kw == "instance":
            inst = self.name("instance name")
            if inst not in INSTANCES:
                raise self.error(f"unknown instance {inst!r} (expected one of {', '.join(INSTANCES)})", start)
            self.instance = inst
            return InstanceDecl(inst, line)
        if kw in ("object", "morphism"):
            if self.instance is None:
                raise self.error(f"{kw} declared before any instance", start)
            name = self.name(f"{kw} name")
            self._fresh(name, start)
            self.expect("=")
            data = self.json_value()
            if kw == "object":
                self.objects.add(name)
                return ObjectDecl(name, self.instance, data, line)
            for key in ("dom", "cod"):
                ref = data.get(key) if isinstance(data, dict) else None
                if isinstance(ref, str) and ref not in self.objects:
                    raise self.unbound(ScriptUnboundObject, ref, start)
            self.generators.add(name)
            return MorphismDecl(name, self.instance, data, line)
        if kw == "let":
            name = self.name("term name")
            self._fresh(name, start)
            self.expect("=")
            term = self.term()
            self.generators.add(name)
            return TermDecl(name, term, line)
        if kw == "check":
            negate = False
            directive = self.name("directive")
            if directive == "not":
                negate = True
                directive = self.name("directive")
            if directive not in DIRECTIVES:
                raise self.error(f"unknown directive {directive!r}", start)
            args = []
            for i, kind in enumerate(DIRECTIVES[directive]):
                if i:
                    self.expect(",")
                args.append(self.arg(kind))
            over = None
            self.skip_inline()
            if directive == "ci" and self.text.startswith("over", self.pos):
                self.pos += 4
                over = [self.obj()]
                while self.peek(","):
                    self.pos += 1
                    over.append(self.obj())
                over = tuple(over)
            return CheckDirective(directive, tuple(args), negate, over, line)
        raise self.error(f"unknown statement {kw!r}", start)

    def _fresh(self, name: str, pos: int):
        if name in self.objects or name in self.generators or name in _RESERVED:
            raise self.error(f"name {name!r} is already bound", pos)

    def arg(self, kind: str):
        if kind == "int":
            self.skip_inline()
            m = _INT.match(self.text, self.pos)
            if not m:
                raise self.error("expected an integer")
            self.pos = m.end()
            return int(m.group())
        if kind == "obj":
            return self.obj()
        return self.term()

    def obj(self) -> tuple:
        self.skip_inline()
        start = self.pos
        first = self.name("object")
        if first == "I":
            return ()
        names = [first]
        while self.peek("*"):
            self.pos += 1
            names.append(self.name("object"))
        for n in names:
            if n not in self.objects:
                raise self.unbound(ScriptUnboundObject, n, start)
        return tuple(names)

    def term(self) -> Term:
        self.skip_inline()
        start = self.pos
        head = self.name("term")
        if head in _TERM_HEADS and self.peek("("):
            self.expect("(")
            ref = self.obj()
            self.expect(")")
            return _TERM_HEADS[head](ref)
        if head == "swap" and self.peek("("):
            self.expect("(")
            a = self.obj()
            self.expect(",")
            b = self.obj()
            self.expect(")")
            return Swap(a, b)
        if head in ("seq", "par") and self.peek("("):
            self.expect("(")
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(")")
            return (Seq if head == "seq" else Par)(a, b)
        if head not in self.generators:
            raise self.unbound(ScriptUnboundGenerator, head, start)
        return Gen(head)


def parse_script(text: str) -> Script:
    """Parse ``text``; raises :class:`ScriptError` at the first problem."""
    return _Parser(text).script()


# emitting

def _emit_obj(ref: tuple) -> str:
    return "*".join(ref) if ref else "I"


def emit_term(term: Term) -> str:
    if isinstance(term, Gen):
        return term.name
    if isinstance(term, (Id, Copy, Discard)):
        head = {Id: "id", Copy: "copy", Discard: "discard"}[type(term)]
        return f"{head}({_emit_obj(term.obj)})"
    if isinstance(term, Swap):
        return f"swap({_emit_obj(term.a)}, {_emit_obj(term.b)})"
    if isinstance(term, (Seq, Par)):
        head = "seq" if isinstance(term, Seq) else "par"
        a, b = (term.first, term.second) if isinstance(term, Seq) else (term.left, term.right)
        return f"{head}({emit_term(a)}, {emit_term(b)})"
    raise TypeError(f"not a term: {term!r}")


def _emit_check(c: CheckDirective) -> str:
    parts = []
    for kind, a in zip(DIRECTIVES[c.directive], c.args):
        parts.append(str(a) if kind == "int" else _emit_obj(a) if kind == "obj" else emit_term(a))
    text = "check " + ("not " if c.negate else "") + c.directive
    if parts:
        text += " " + ", ".join(parts)
    if c.over is not None:
        text += " over " + ", ".join(_emit_obj(o) for o in c.over)
    return text


def emit_script(script: Script) -> str:
    lines = []
    current = None
    for s in script.statements:
        if isinstance(s, InstanceDecl):
            lines.append(f"instance {s.name}")
            current = s.name
        elif isinstance(s, (ObjectDecl, MorphismDecl)):
            if s.instance != current:
                lines.append(f"instance {s.instance}")
                current = s.instance
            kw = "object" if isinstance(s, ObjectDecl) else "morphism"
            lines.append(f"{kw} {s.name} = {json.dumps(s.data, sort_keys=True)}")
        elif isinstance(s, TermDecl):
            lines.append(f"let {s.name} = {emit_term(s.term)}")
        else:
            lines.append(_emit_check(s))
    return "\n".join(lines) + ("\n" if lines else "")
