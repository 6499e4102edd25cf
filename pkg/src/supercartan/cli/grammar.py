"""Line-oriented document language.

One statement per line, ``#`` starts a comment::

    algebra g = catalog("so", 1, 4)
    algebra bad = mutate(g, M[0 1], M[0 2], M[1 2], 1)
    algebra su2 = define(J[a] 3 even, [J[0], J[1]] = J[2], [J[1], J[2]] = J[0], [J[2], J[0]] = J[1])
    connection c = soften(g)
    check jacobi(bad)
    check all-catalog-jacobi

Definition keywords are ``algebra split connection lagrangian gauge fda
extend``; ``check`` runs a directive.  Generator declarations inside
``define`` read ``NAME[i j] asym N even`` (index block, optional ``asym`` or
``sym`` marker, index range, parity).  Numbers are rationals, optionally
imaginary (``1/2``, ``-3``, ``1/2i``, ``i``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..catalog import CATALOG_ARITY, CATALOG_NAMES
from ..scalar import Scalar, parse_gaussian

__all__ = [
    "SpecError",
    "Label",
    "Word",
    "Str",
    "Num",
    "GenDecl",
    "BracketDecl",
    "Statement",
    "SpecDocument",
    "SIGNATURES",
    "BUILTIN_SUITES",
    "parse_spec",
    "render_spec",
]

KEYWORDS = ("algebra", "split", "connection", "lagrangian", "gauge", "fda", "extend", "check")


class SpecError(Exception):
    """Structural document error (syntax, arity, reference, duplicate)."""

    def __init__(self, kind: str, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {kind} error: {message}")
        self.kind = kind
        self.message = message
        self.line = line
        self.col = col


# -- AST ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class Label:
    name: str
    index: tuple = ()

    def render(self) -> str:
        if not self.index:
            return self.name
        return f"{self.name}[{' '.join(map(str, self.index))}]"

    @property
    def key(self):
        return (self.name, self.index) if self.index else self.name


@dataclass(frozen=True)
class Word:
    """A bare identifier: a reference or a keyword-like option."""

    name: str

    def render(self) -> str:
        return self.name


@dataclass(frozen=True)
class Str:
    value: str

    def render(self) -> str:
        return '"' + self.value.replace("\\", "\\\\").replace('"', '\\"') + '"'


@dataclass(frozen=True)
class Num:
    value: Scalar

    def render(self) -> str:
        return _render_number(self.value)


@dataclass(frozen=True)
class GenDecl:
    name: str
    indices: tuple = ()
    symmetry: str | None = None  # "asym" | "sym" | None
    range: int = 0
    parity: str = "even"

    def render(self) -> str:
        if not self.indices:
            return f"{self.name} {self.parity}"
        head = f"{self.name}[{' '.join(self.indices)}]"
        sym = f" {self.symmetry}" if self.symmetry else ""
        return f"{head}{sym} {self.range} {self.parity}"


@dataclass(frozen=True)
class BracketDecl:
    left: Label
    right: Label
    terms: tuple = ()  # ((Label, Scalar), ...) sorted by label rendering

    def render(self) -> str:
        parts = []
        for lab, c in self.terms:
            for piece in _split_gaussian(c):
                parts.append((piece, lab))
        if not parts:
            rhs = "0"
        else:
            rhs = ""
            for k, (c, lab) in enumerate(parts):
                neg = _is_negative(c)
                mag = -c if neg else c
                coef = "" if mag == Scalar(1) else _render_number(mag) + " "
                sign = ("-" if neg else "") if k == 0 else (" - " if neg else " + ")
                rhs += f"{sign}{coef}{lab.render()}"
        return f"[{self.left.render()}, {self.right.render()}] = {rhs}"


@dataclass(frozen=True)
class Statement:
    keyword: str
    name: str | None
    func: str
    args: tuple | None  # None for a bare built-in suite name
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def call(self) -> str:
        if self.args is None:
            return self.func
        return f"{self.func}({', '.join(a.render() for a in self.args)})"

    def render(self) -> str:
        if self.keyword == "check":
            return f"check {self.call()}"
        return f"{self.keyword} {self.name} = {self.call()}"


@dataclass(frozen=True)
class SpecDocument:
    statements: tuple = ()

    def __len__(self) -> int:
        return len(self.statements)

    def definitions(self) -> dict:
        return {s.name: s for s in self.statements if s.keyword != "check"}

    def checks(self) -> list:
        return [s for s in self.statements if s.keyword == "check"]


def _render_number(v: Scalar) -> str:
    return str(v)


def _split_gaussian(c: Scalar) -> list[Scalar]:
    re_, im = _parts(c)
    out = []
    if re_:
        out.append(Scalar(re_))
    if im:
        out.append(Scalar.gaussian(0, im))
    return out


def _parts(c: Scalar):
    if c.is_zero():
        return 0, 0
    return c.constant()


def _is_negative(c: Scalar) -> bool:
    re_, im = _parts(c)
    return (re_ or im) < 0


# -- signatures --------------------------------------------------------------------------
#
# Parameter kinds: a reference kind (a definition keyword), "int", "num",
# "str", "label", "word", "gendecl", "bracket".  A trailing "*" repeats the
# last kind zero or more times, "?" marks an optional parameter.

SIGNATURES: dict = {
    "algebra": {
        "catalog": ("str", "int*"),
        "mutate": ("algebra", "label", "label", "label", "num?"),
        "rescale": ("algebra", "str", "word*"),
        "define": ("gendecl*",),  # followed by bracket declarations
    },
    "split": {"reductive": ("algebra", "word*")},
    "connection": {"soften": ("algebra", "word?"), "flat": ("algebra", "word?")},
    "lagrangian": {
        "einstein_cartan": ("word?",),
        "macdowell_mansouri": (),
        "euler": (),
        "sugra": (),
        "topological": (),
        "chern_simons": (),
    },
    "gauge": {"rule": ("lagrangian", "word*")},
    "fda": {"d4": (), "d11": ("word?",), "d11_mutated": (), "horizontal": ("algebra", "word*")},
    "extend": {"step": ("fda", "word", "int", "num")},
    "check": {
        "jacobi": ("algebra",),
        "validate": ("algebra",),
        "split": ("split",),
        "nilpotency": ("connection",),
        "bianchi": ("connection",),
        "variation": ("lagrangian",),
        "gauge": ("lagrangian", "gauge"),
        "noether": ("lagrangian", "gauge"),
        "fda_closure": ("fda",),
        "mm_identity": (),
        "sugra_equations": (),
    },
}

BUILTIN_SUITES = (
    "all-catalog-jacobi",
    "catalog-nilpotency",
    "catalog-bianchi",
    "mutation-suite",
    "fierz",
    "d4-fda",
    "d11-fda",
    "ec-mm",
    "sugra-equations",
)

_WORD_CHOICES = {
    ("connection", "soften"): ("total", "separate"),
    ("connection", "flat"): ("total", "separate"),
    ("lagrangian", "einstein_cartan"): ("cosmological",),
    ("fda", "d11"): ("six_form",),
}


# -- lexer -------------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<comment>\#.*)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<num>\d+(?:/\d+)?i?)
  | (?P<ident>[A-Za-z_](?:[A-Za-z0-9_]|-(?=[A-Za-z0-9_]))*)
  | (?P<punct>[()\[\],=+\-*])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _lex(line: str, lineno: int) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if not m:
            raise SpecError("syntax", f"unexpected character {line[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), pos + 1))
        pos = m.end()
    toks.append(_Tok("end", "", len(line) + 1))
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok], lineno: int):
        self.toks = toks
        self.i = 0
        self.line = lineno

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: _Tok | None = None, kind: str = "syntax"):
        tok = tok or self.cur
        raise SpecError(kind, msg, self.line, tok.col)

    def take(self, kind: str, text: str | None = None) -> _Tok:
        t = self.cur
        if t.kind != kind or (text is not None and t.text != text):
            want = repr(text) if text else kind
            got = repr(t.text) if t.text else "end of line"
            self.error(f"expected {want}, found {got}")
        self.i += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.cur
        return t.kind == kind and (text is None or t.text == text)

    # -- statements

    def statement(self) -> Statement:
        kw = self.take("ident")
        if kw.text not in KEYWORDS:
            self.error(f"unknown keyword {kw.text!r} (expected one of {', '.join(KEYWORDS)})", kw)
        if kw.text == "check":
            fn = self.take("ident")
            if not self.at("punct", "("):
                if fn.text not in BUILTIN_SUITES:
                    self.error(f"unknown built-in suite {fn.text!r}", fn)
                self.take("end")
                return Statement("check", None, fn.text, None, self.line, kw.col)
            args = self.call_args(fn)
            self.take("end")
            return Statement("check", None, fn.text, args, self.line, kw.col)
        name = self.take("ident")
        self.take("punct", "=")
        fn = self.take("ident")
        if fn.text not in SIGNATURES[kw.text]:
            known = ", ".join(sorted(SIGNATURES[kw.text]))
            self.error(f"unknown {kw.text} constructor {fn.text!r} (known: {known})", fn)
        args = self.call_args(fn, kw.text)
        self.take("end")
        return Statement(kw.text, name.text, fn.text, args, self.line, kw.col)

    def call_args(self, fn: _Tok, keyword: str = "check") -> tuple:
        self.take("punct", "(")
        args, cols = [], []
        if not self.at("punct", ")"):
            while True:
                cols.append(self.cur.col)
                args.append(self.argument(fn.text))
                if self.at("punct", ","):
                    self.take("punct", ",")
                    continue
                break
        self.take("punct", ")")
        sig = SIGNATURES[keyword].get(fn.text)
        if sig is None:
            self.error(f"unknown check {fn.text!r}", fn)
        self.check_arity(keyword, fn, sig, args, cols)
        return tuple(args)

    def argument(self, fn: str):
        t = self.cur
        if t.kind == "str":
            self.i += 1
            return Str(re.sub(r"\\(.)", r"\1", t.text[1:-1]))
        if t.kind == "num" or (t.kind == "punct" and t.text == "-") or (t.kind == "ident" and t.text == "i"):
            return Num(self.number())
        if t.kind == "punct" and t.text == "[":
            return self.bracket()
        if t.kind == "ident":
            if self.peek().kind == "punct" and self.peek().text == "[":
                lab_or_decl = self.label_or_decl()
                return lab_or_decl
            self.i += 1
            if self.at("ident", "even") or self.at("ident", "odd"):
                par = self.take("ident").text
                return GenDecl(t.text, (), None, 0, par)
            return Word(t.text)
        self.error(f"unexpected {t.text!r} in argument list" if t.text else "unexpected end of line")

    def number(self) -> Scalar:
        neg = False
        if self.at("punct", "-"):
            self.take("punct", "-")
            neg = True
        t = self.cur
        if t.kind == "num" or (t.kind == "ident" and t.text == "i"):
            self.i += 1
            v = parse_gaussian(t.text)
            return -v if neg else v
        self.error("expected a number")

    def index_block(self) -> tuple[list[_Tok], bool]:
        self.take("punct", "[")
        items = []
        while not self.at("punct", "]"):
            t = self.cur
            if t.kind not in ("num", "ident"):
                self.error("expected an index")
            items.append(t)
            self.i += 1
        self.take("punct", "]")
        return items

    def label(self) -> Label:
        name = self.take("ident")
        if not self.at("punct", "["):
            return Label(name.text)
        items = self.index_block()
        idx = []
        for t in items:
            if t.kind != "num" or not t.text.isdigit():
                self.error("generator label indices must be non-negative integers", t)
            idx.append(int(t.text))
        return Label(name.text, tuple(idx))

    def label_or_decl(self):
        start = self.i
        name = self.take("ident")
        items = self.index_block()
        if all(t.kind == "num" and t.text.isdigit() for t in items) and items:
            return Label(name.text, tuple(int(t.text) for t in items))
        if not all(t.kind == "ident" for t in items):
            self.i = start
            self.error("an index block holds either integers (label) or index names (declaration)")
        sym = None
        if self.at("ident", "asym") or self.at("ident", "sym"):
            sym = self.take("ident").text
        rng = self.take("num")
        if not rng.text.isdigit():
            self.error("index range must be a positive integer", rng)
        if self.at("ident", "even") or self.at("ident", "odd"):
            par = self.take("ident").text
        else:
            self.error("expected parity 'even' or 'odd'")
        if sym and len(items) < 2:
            self.error(f"'{sym}' needs at least two indices", items[0] if items else None)
        return GenDecl(name.text, tuple(t.text for t in items), sym, int(rng.text), par)

    def bracket(self) -> BracketDecl:
        self.take("punct", "[")
        left = self.label()
        self.take("punct", ",")
        right = self.label()
        self.take("punct", "]")
        self.take("punct", "=")
        terms: dict = {}
        first = True
        if self.at("num", "0") and self.peek().text in (",", ")", ""):
            self.take("num")
            return BracketDecl(left, right, ())
        while True:
            sign = Scalar(1)
            if self.at("punct", "+") or self.at("punct", "-"):
                if self.take("punct").text == "-":
                    sign = -sign
            elif not first:
                break
            coef = Scalar(1)
            if self.at("num") or (self.at("ident", "i") and not (self.peek().kind == "punct" and self.peek().text == "[")):
                coef = self.number()
                if self.at("punct", "*"):
                    self.take("punct", "*")
            lab = self.label()
            terms[lab] = terms.get(lab, Scalar(0)) + sign * coef
            first = False
        items = tuple(sorted(((k, v) for k, v in terms.items() if not v.is_zero()), key=lambda kv: kv[0].render()))
        return BracketDecl(left, right, items)

    # -- arity

    def check_arity(self, keyword, fn, sig, args, cols):
        kinds = _expand_signature(sig, args)
        if kinds is None:
            lo = sum(1 for s in sig if not s.endswith(("*", "?")))
            hi = "more" if any(s.endswith("*") for s in sig) else str(len(sig))
            self.error(f"{fn.text} takes {lo}{'' if hi == str(lo) else ' to ' + hi} arguments, got {len(args)}", fn, "arity")
        if fn.text == "define":
            seen_bracket = False
            for a, c in zip(args, cols):
                if isinstance(a, BracketDecl):
                    seen_bracket = True
                elif isinstance(a, GenDecl):
                    if seen_bracket:
                        raise SpecError("syntax", "generator declarations must precede brackets", self.line, c)
                else:
                    raise SpecError("syntax", "define takes generator declarations and brackets", self.line, c)
            return
        for a, k, c in zip(args, kinds, cols):
            if not _kind_ok(a, k):
                raise SpecError("syntax", f"argument {a.render()} is not a {k}", self.line, c)
            choices = _WORD_CHOICES.get((keyword, fn.text))
            if k == "word" and choices and a.name not in choices:
                raise SpecError("syntax", f"unknown option {a.name!r} (expected {', '.join(choices)})", self.line, c)
        if keyword == "algebra" and fn.text == "catalog":
            cname = args[0].value
            if cname not in CATALOG_ARITY:
                raise SpecError("reference", f"unknown catalog algebra {cname!r} (known: {', '.join(CATALOG_NAMES)})", self.line, cols[0])
            n = len(args) - 1
            if n not in CATALOG_ARITY[cname]:
                want = " or ".join(map(str, CATALOG_ARITY[cname]))
                raise SpecError("arity", f"catalog algebra {cname!r} takes {want} parameters, got {n}", self.line, fn.col)


def _expand_signature(sig: tuple, args: list):
    fixed = [s for s in sig if not s.endswith(("*", "?"))]
    optional = [s[:-1] for s in sig if s.endswith("?")]
    star = [s[:-1] for s in sig if s.endswith("*")]
    n = len(args)
    if n < len(fixed):
        return None
    if not star and n > len(fixed) + len(optional):
        return None
    kinds = list(fixed) + optional[: n - len(fixed)]
    while len(kinds) < n:
        kinds.append(star[0])
    return kinds


_REF_KINDS = ("algebra", "split", "connection", "lagrangian", "gauge", "fda")


def _kind_ok(a, k: str) -> bool:
    if k in _REF_KINDS or k == "word":
        return isinstance(a, Word)
    if k == "int":
        if not isinstance(a, Num) or not a.value.is_constant():
            return False
        re_, im = _parts(a.value)
        return im == 0 and re_.denominator == 1
    if k == "num":
        return isinstance(a, Num)
    if k == "str":
        return isinstance(a, Str)
    if k == "label":
        return isinstance(a, Label)
    if k == "gendecl":
        return isinstance(a, GenDecl)
    if k == "bracket":
        return isinstance(a, BracketDecl)
    return False


def _resolve(doc: list[Statement], lines: dict) -> None:
    defined: dict = {}
    for st in doc:
        sig = SIGNATURES[st.keyword].get(st.func, ()) if st.args is not None else ()
        if st.args is not None and st.func != "define":
            for a, k in zip(st.args, _expand_signature(sig, list(st.args)) or ()):
                if k in _REF_KINDS:
                    got = defined.get(a.name)
                    if got is None:
                        raise SpecError("reference", f"undefined {k} {a.name!r}", st.line, _find_col(lines[st.line], a.name, st.col))
                    if got != k:
                        raise SpecError("reference", f"{a.name!r} is a {got}, expected a {k}", st.line, _find_col(lines[st.line], a.name, st.col))
        if st.keyword != "check":
            if st.name in defined:
                raise SpecError("duplicate", f"name {st.name!r} already defined", st.line, _find_col(lines[st.line], st.name, st.col))
            kind = "fda" if st.keyword == "extend" else st.keyword
            defined[st.name] = kind


def _find_col(line: str, word: str, default: int) -> int:
    m = re.search(r"(?<![A-Za-z0-9_\-])" + re.escape(word) + r"(?![A-Za-z0-9_\-])", line[default - 1 :])
    return default + m.start() if m else default


def parse_spec(text: str) -> SpecDocument:
    """Parse a document; raises :class:`SpecError` at the first problem."""
    statements = []
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        lines[lineno] = raw
        toks = _lex(raw, lineno)
        if toks[0].kind == "end":
            continue
        statements.append(_Parser(toks, lineno).statement())
    _resolve(statements, lines)
    return SpecDocument(tuple(statements))


def render_spec(doc: SpecDocument) -> str:
    """Canonical text of a document (one statement per line, no comments)."""
    return "".join(st.render() + "\n" for st in doc.statements)
