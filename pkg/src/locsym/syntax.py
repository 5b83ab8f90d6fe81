"""Problem source format: tokenizer, recursive-descent parser and printer.

Example::

    vocab {
      pred Edge/2 input
      func Color/1 output
    }
    domain = { t u r g }
    theory {
      ! x y : Edge(x, y) => Color(x) ~= Color(y).
    }
    structure {
      Edge = { (t, u) }
    }

``!`` and ``?`` are the quantifiers, ``~ & | => <=>`` the connectives and
``~=`` is negated equality. ``%`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .logic import (
    FUNC,
    INPUT,
    OUTPUT,
    PRED,
    And,
    Apply,
    Atom,
    Equals,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Problem,
    Structure,
    StructureError,
    Symbol,
    Term,
    Var,
    all_tuples,
    rename_apart,
)

RESERVED_SEPARATOR = "#"


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message, self.line, self.column = message, line, column
        super().__init__(f"{line}:{column}: {message}" if line else message)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<op><=>|=>|~=|->|[{}()\[\],./:=!?&|~])
  | (?P<name>[A-Za-z0-9_][A-Za-z0-9_#']*)
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        newlines = m.group().count("\n")
        if newlines:
            line += newlines
            line_start = pos + m.group().rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.symbols: dict[str, Symbol] = {}

    # -- token helpers --
    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind != "eof":
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.tok
        if not self.accept(text):
            raise self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return tok

    def name(self) -> Token:
        tok = self.tok
        if tok.kind != "name":
            raise self.error(f"expected a name, found {tok.text or 'end of input'!r}")
        self.pos += 1
        return tok

    # -- sections --
    def problem(self) -> Problem:
        self.expect("vocab")
        symbols = self.vocab()
        self.expect("domain")
        self.expect("=")
        domain = self.name_set()
        self.domain = domain
        self.expect("theory")
        theory = self.theory()
        self.expect("structure")
        structure = self.structure(domain)
        order: tuple = domain
        if self.tok.text == "order":
            tok = self.tok
            self.pos += 1
            self.expect("=")
            order = self.name_set()
            if sorted(order) != sorted(domain):
                raise self.error("order must list every domain element exactly once", tok)
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        reserved = [s.name for s in symbols]
        return Problem(symbols, domain, rename_apart(theory, reserved), structure, order)

    def vocab(self) -> tuple:
        self.expect("{")
        symbols = []
        while not self.accept("}"):
            kind_tok = self.tok
            if not (self.accept(PRED) or self.accept(FUNC)):
                raise self.error("expected 'pred' or 'func'")
            name = self.name()
            if RESERVED_SEPARATOR in name.text:
                raise self.error(f"'#' is reserved and cannot appear in {name.text!r}", name)
            if name.text in self.symbols:
                raise self.error(f"duplicate symbol {name.text!r}", name)
            self.expect("/")
            arity_tok = self.name()
            if not arity_tok.text.isdigit():
                raise self.error("arity must be a non-negative integer", arity_tok)
            io_tok = self.tok
            if not (self.accept(INPUT) or self.accept(OUTPUT)):
                raise self.error("expected 'input' or 'output'")
            sym = Symbol(name.text, int(arity_tok.text), kind_tok.text, io_tok.text)
            self.symbols[sym.name] = sym
            symbols.append(sym)
        if not symbols:
            raise self.error("vocabulary is empty")
        return tuple(symbols)

    def name_set(self) -> tuple:
        self.expect("{")
        names = []
        while not self.accept("}"):
            tok = self.name()
            if tok.text in names:
                raise self.error(f"duplicate element {tok.text!r}", tok)
            names.append(tok.text)
        if not names:
            raise self.error("set must not be empty")
        return tuple(names)

    def theory(self) -> tuple:
        self.expect("{")
        sentences = []
        while not self.accept("}"):
            sentences.append(self.formula(frozenset()))
            self.expect(".")
        return tuple(sentences)

    # -- formulas --
    def formula(self, bound: frozenset) -> Formula:
        left = self.implication(bound)
        while self.tok.text == "<=>":
            self.pos += 1
            left = Iff(left, self.implication(bound))
        return left

    def implication(self, bound: frozenset) -> Formula:
        left = self.disjunction(bound)
        if self.accept("=>"):
            return Implies(left, self.implication(bound))
        return left

    def disjunction(self, bound: frozenset) -> Formula:
        parts = [self.conjunction(bound)]
        while self.accept("|"):
            parts.append(self.conjunction(bound))
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self, bound: frozenset) -> Formula:
        parts = [self.unary(bound)]
        while self.accept("&"):
            parts.append(self.unary(bound))
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self, bound: frozenset) -> Formula:
        if self.accept("~"):
            return Not(self.unary(bound))
        if self.tok.text in ("!", "?"):
            universal = self.tok.text == "!"
            self.pos += 1
            names = []
            while self.tok.kind == "name":
                tok = self.name()
                if tok.text in self.symbols:
                    raise self.error(f"variable {tok.text!r} clashes with a vocabulary symbol", tok)
                if RESERVED_SEPARATOR in tok.text:
                    raise self.error("'#' is reserved", tok)
                names.append(tok.text)
            if not names:
                raise self.error("quantifier needs at least one variable")
            self.expect(":")
            body = self.formula(bound | set(names))
            return (Forall if universal else Exists)(tuple(names), body)
        if self.tok.text == "(":
            # Parenthesised formula, unless it is a term followed by (~)=.
            save = self.pos
            self.pos += 1
            try:
                inner = self.formula(bound)
                self.expect(")")
                if self.tok.text not in ("=", "~="):
                    return inner
            except ParseError:
                pass
            self.pos = save
        return self.atomic(bound)

    def atomic(self, bound: frozenset) -> Formula:
        tok = self.tok
        if tok.kind == "name" and self.symbols.get(tok.text, None) is not None and self.symbols[tok.text].kind == PRED:
            sym = self.symbols[tok.text]
            self.pos += 1
            args = self.arguments(bound) if self.tok.text == "(" else ()
            if len(args) != sym.arity:
                raise self.error(f"{sym.name} expects {sym.arity} arguments, got {len(args)}", tok)
            return Atom(sym.name, args)
        left = self.term(bound)
        if self.accept("="):
            return Equals(left, self.term(bound))
        if self.accept("~="):
            return Not(Equals(left, self.term(bound)))
        raise self.error("expected '=' or '~=' after term")

    def arguments(self, bound: frozenset) -> tuple:
        self.expect("(")
        args = []
        if not self.accept(")"):
            args.append(self.term(bound))
            while self.accept(","):
                args.append(self.term(bound))
            self.expect(")")
        return tuple(args)

    def term(self, bound: frozenset) -> Term:
        if self.tok.text == "(":
            self.pos += 1
            t = self.term(bound)
            self.expect(")")
            return t
        tok = self.name()
        if tok.text in bound:
            if self.tok.text == "(":
                raise self.error(f"variable {tok.text!r} applied to arguments", tok)
            return Var(tok.text)
        sym = self.symbols.get(tok.text)
        if sym is None:
            raise self.error(f"undeclared symbol {tok.text!r}", tok)
        if sym.kind != FUNC:
            raise self.error(f"predicate {tok.text!r} used as a term", tok)
        args = self.arguments(bound) if self.tok.text == "(" else ()
        if len(args) != sym.arity:
            raise self.error(f"{sym.name} expects {sym.arity} arguments, got {len(args)}", tok)
        return Apply(sym.name, args)

    # -- structure --
    def structure(self, domain: tuple) -> Structure:
        self.expect("{")
        members = set(domain)
        interp: dict = {}
        while not self.accept("}"):
            tok = self.name()
            sym = self.symbols.get(tok.text)
            if sym is None:
                raise self.error(f"undeclared symbol {tok.text!r}", tok)
            if sym.io != INPUT:
                raise self.error(f"{tok.text!r} is an output symbol and cannot be interpreted", tok)
            if sym.name in interp:
                raise self.error(f"{tok.text!r} interpreted twice", tok)
            self.expect("=")
            if sym.kind == PRED:
                interp[sym.name] = self.tuple_set(sym, members)
            else:
                interp[sym.name] = self.map_list(sym, members, domain, tok)
        inputs = tuple(s for s in self.symbols.values() if s.io == INPUT)
        missing = [s.name for s in inputs if s.name not in interp]
        if missing:
            raise self.error(f"input symbols not interpreted: {', '.join(missing)}")
        try:
            return Structure(domain, inputs, interp)
        except StructureError as exc:
            raise self.error(str(exc)) from None

    def element(self, members: set) -> str:
        tok = self.name()
        if tok.text not in members:
            raise self.error(f"{tok.text!r} is not a domain element", tok)
        return tok.text

    def element_tuple(self, arity: int, members: set) -> tuple:
        tok = self.tok
        if self.accept("("):
            items = []
            if not self.accept(")"):
                items.append(self.element(members))
                while self.accept(","):
                    items.append(self.element(members))
                self.expect(")")
        else:
            items = [self.element(members)]
        if len(items) != arity:
            raise self.error(f"expected a tuple of arity {arity}", tok)
        return tuple(items)

    def tuple_set(self, sym: Symbol, members: set) -> frozenset:
        self.expect("{")
        tuples = set()
        while not self.accept("}"):
            tuples.add(self.element_tuple(sym.arity, members))
            self.accept(",")
        return frozenset(tuples)

    def map_list(self, sym: Symbol, members: set, domain: tuple, at: Token) -> dict:
        self.expect("{")
        table: dict = {}
        while not self.accept("}"):
            key_tok = self.tok
            key = self.element_tuple(sym.arity, members)
            self.expect("->")
            value = self.element(members)
            if key in table and table[key] != value:
                raise self.error(f"{sym.name}{key} mapped twice", key_tok)
            table[key] = value
            self.accept(",")
        missing = [t for t in all_tuples(domain, sym.arity) if t not in table]
        if missing:
            raise self.error(f"function {sym.name} is not total: no value for {missing[0]}", at)
        return table


def parse_problem(text: str) -> Problem:
    """Parse a problem source; bound variables come back renamed apart."""
    return _Parser(text).problem()


def parse_formula(text: str, symbols: Sequence[Symbol]) -> Formula:
    parser = _Parser(text)
    parser.symbols = {s.name: s for s in symbols}
    phi = parser.formula(frozenset())
    if parser.tok.kind != "eof":
        raise parser.error(f"unexpected {parser.tok.text!r}")
    return phi


# --- printing --------------------------------------------------------------


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.symbol
    return f"{t.symbol}({', '.join(format_term(a) for a in t.args)})"


def _is_simple(phi: Formula) -> bool:
    if isinstance(phi, (Atom, Equals)):
        return True
    return isinstance(phi, Not) and _is_simple(phi.body)


def _wrap(phi: Formula) -> str:
    text = format_formula(phi)
    return text if _is_simple(phi) else f"({text})"


def format_formula(phi: Formula) -> str:
    if isinstance(phi, Atom):
        if not phi.args:
            return phi.symbol
        return f"{phi.symbol}({', '.join(format_term(a) for a in phi.args)})"
    if isinstance(phi, Equals):
        return f"{format_term(phi.left)} = {format_term(phi.right)}"
    if isinstance(phi, Not):
        if isinstance(phi.body, Equals):
            return f"{format_term(phi.body.left)} ~= {format_term(phi.body.right)}"
        return f"~{_wrap(phi.body)}"
    if isinstance(phi, And):
        return " & ".join(_wrap(p) for p in phi.parts)
    if isinstance(phi, Or):
        return " | ".join(_wrap(p) for p in phi.parts)
    if isinstance(phi, Implies):
        return f"{_wrap(phi.left)} => {_wrap(phi.right)}"
    if isinstance(phi, Iff):
        return f"{_wrap(phi.left)} <=> {_wrap(phi.right)}"
    if isinstance(phi, (Forall, Exists)):
        q = "!" if isinstance(phi, Forall) else "?"
        return f"{q} {' '.join(phi.variables)} : {format_formula(phi.body)}"
    raise TypeError(f"not a formula: {phi!r}")


def format_theory(theory: Sequence[Formula], indent: str = "") -> str:
    return "".join(f"{indent}{format_formula(phi)}.\n" for phi in theory)


def _format_tuple(t: tuple) -> str:
    return t[0] if len(t) == 1 else f"({', '.join(t)})"


def format_interpretation(sym: Symbol, value: object, domain: Sequence[str]) -> str:
    rank = {d: i for i, d in enumerate(domain)}

    def order(t: tuple) -> tuple:
        return tuple(rank[d] for d in t)

    if sym.kind == PRED:
        items = [_format_tuple(t) for t in sorted(value, key=order)]  # type: ignore[arg-type]
    else:
        items = [f"{_format_tuple(k)} -> {value[k]}" for k in sorted(value, key=order)]  # type: ignore[index]
    return "{ " + ", ".join(items) + " }" if items else "{ }"


def format_structure(structure: Structure, indent: str = "  ") -> str:
    lines = ["structure {"]
    for sym in structure.symbols:
        lines.append(
            f"{indent}{sym.name} = {format_interpretation(sym, structure.interp[sym.name], structure.domain)}"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_problem(problem: Problem) -> str:
    """Canonical source text; ``parse_problem`` inverts it exactly."""
    lines = ["vocab {"]
    for s in problem.symbols:
        lines.append(f"  {s.kind} {s.name}/{s.arity} {s.io}")
    lines.append("}")
    lines.append("domain = { " + " ".join(problem.domain) + " }")
    lines.append("theory {")
    text = "\n".join(lines) + "\n" + format_theory(problem.theory, "  ") + "}\n"
    text += format_structure(problem.structure)
    if problem.order != problem.domain:
        text += "order = { " + " ".join(problem.order) + " }\n"
    return text
