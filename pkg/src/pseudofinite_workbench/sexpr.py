# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""S-expression reader and printer for formulas.

Grammar (whitespace separated, ``;`` starts a comment)::

    formula := atom | true | false
             | (not formula) | (and formula*) | (or formula*)
             | (exists var formula) | (forall var formula)
    atom    := (U "digits" var) | (B "digits" "digits" var var)
             | (E term term) | (= term term)
             | (Cinit k term) | (Cfin k term)
    term    := var | (app "fg-word" var) | (S k var-or-const)

Digit strings are comma separated (``"0,1"``); FG words apply leftmost-outermost.
"""

import re
from dataclasses import dataclass
from typing import Union

from pseudofinite_workbench.formula import (
    FALSE,
    STAR_CONSTANTS,
    TRUE,
    And,
    BAtom,
    ClassAtom,
    ClassKind,
    EAtom,
    EqAtom,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Signature,
    SignatureError,
    StarTerm,
    Term,
    UAtom,
    WorkbenchError,
    format_digits,
    parse_digits,
    rename_bound_apart,
)


class FormulaSyntaxError(WorkbenchError):
    """Raised when formula text does not follow the grammar."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"Syntax error, {message} (at {line}:{column})")
        self.line = line
        self.column = column


_WS = re.compile(r"\s+")
_COMMENT = re.compile(r";[^\n]*")
_LPAREN = re.compile(r"\(")
_RPAREN = re.compile(r"\)")
_STRING = re.compile(r'"([^"\\]*)"')
_SYMBOL = re.compile(r"[A-Za-z_=][A-Za-z0-9_'=]*|[0-9]+")


@dataclass(frozen=True)
class _Token:
    text: str
    quoted: bool
    line: int
    column: int


@dataclass(frozen=True)
class _SList:
    items: tuple[Union["_SList", _Token], ...]
    line: int
    column: int


class _Input:
    """Cursor over the source text that tracks line and column."""

    def __init__(self, text: str):
        self.text = text
        self.index = 0
        self.line = 1
        self.column = 1

    def match(self, pattern: re.Pattern) -> re.Match | None:
        return pattern.match(self.text, self.index)

    def consume(self, pattern: re.Pattern, desc: str) -> re.Match:
        m = self.match(pattern)
        if m is None:
            self.error(desc)
        consumed = m.group()
        self.index = m.end()
        newlines = consumed.count("\n")
        if newlines:
            self.line += newlines
            self.column = len(consumed) - consumed.rfind("\n")
        else:
            self.column += len(consumed)
        return m

    def skip_blank(self) -> None:
        while self.match(_WS) or self.match(_COMMENT):
            self.consume(_WS if self.match(_WS) else _COMMENT, "blank")

    def eof(self) -> bool:
        return self.index >= len(self.text)

    def error(self, desc: str) -> None:
        context = self.text[self.index : self.index + 20]
        raise FormulaSyntaxError(f"{desc}: {context!r}", self.line, self.column)


def _read(source: _Input) -> Union[_SList, _Token]:
    source.skip_blank()
    line, column = source.line, source.column
    if source.match(_LPAREN):
        source.consume(_LPAREN, "expected (")
        items = []
        while True:
            source.skip_blank()
            if source.eof():
                raise FormulaSyntaxError("expected )", source.line, source.column)
            if source.match(_RPAREN):
                source.consume(_RPAREN, "expected )")
                return _SList(tuple(items), line, column)
            items.append(_read(source))
    if source.match(_STRING):
        m = source.consume(_STRING, "expected string")
        return _Token(m.group(1), True, line, column)
    if source.match(_SYMBOL):
        m = source.consume(_SYMBOL, "expected symbol")
        return _Token(m.group(), False, line, column)
    source.error("unexpected input")
    raise AssertionError("unreachable")


class _Builder:
    """Turns s-expressions into formulas for one signature."""

    def __init__(self, sig: Signature):
        self.sig = sig

    def fail(self, node: Union[_SList, _Token], message: str) -> None:
        raise FormulaSyntaxError(message, node.line, node.column)

    def require(self, node: Union[_SList, _Token], *allowed: Signature) -> None:
        if self.sig not in allowed:
            raise SignatureError(
                f"Construct at {node.line}:{node.column} is not available in signature "
                f"{self.sig.value}"
            )

    def var(self, node: Union[_SList, _Token]) -> str:
        if not isinstance(node, _Token) or node.quoted or node.text.isdigit():
            self.fail(node, "expected a variable")
        if node.text in STAR_CONSTANTS:
            self.fail(node, f"constant {node.text!r} used where a variable is required")
        return node.text

    def number(self, node: Union[_SList, _Token]) -> int:
        if not isinstance(node, _Token) or node.quoted or not node.text.isdigit():
            self.fail(node, "expected a natural number")
        return int(node.text)

    def string(self, node: Union[_SList, _Token]) -> str:
        if not isinstance(node, _Token) or not node.quoted:
            self.fail(node, "expected a quoted string")
        return node.text

    def digits(self, node: Union[_SList, _Token]) -> tuple[int, ...]:
        try:
            return parse_digits(self.string(node))
        except ValueError as e:
            raise FormulaSyntaxError(str(e), node.line, node.column) from e

    def arity(self, node: _SList, expected: int) -> None:
        head = node.items[0].text
        if len(node.items) - 1 != expected:
            self.fail(
                node, f"{head} expects {expected} argument(s), got {len(node.items) - 1}"
            )

    def term(self, node: Union[_SList, _Token]) -> Union[Term, StarTerm]:
        if isinstance(node, _Token):
            if node.text in STAR_CONSTANTS:
                self.require(node, Signature.STAR)
                return StarTerm(node.text)
            name = self.var(node)
            return StarTerm(name) if self.sig is Signature.STAR else Term(name)
        if not node.items or not isinstance(node.items[0], _Token):
            self.fail(node, "expected a term")
        head = node.items[0].text
        if head == "app":
            self.require(node, Signature.PAIR)
            self.arity(node, 2)
            word = self.string(node.items[1])
            try:
                return Term(self.var(node.items[2]), word)
            except ValueError as e:
                raise FormulaSyntaxError(str(e), node.line, node.column) from e
        if head == "S":
            self.require(node, Signature.STAR)
            self.arity(node, 2)
            base = node.items[2]
            if not isinstance(base, _Token) or base.quoted:
                self.fail(base, "expected a variable or constant")
            return StarTerm(base.text, self.number(node.items[1]))
        self.fail(node, f"unknown term constructor {head!r}")
        raise AssertionError("unreachable")

    def plain_term(self, node: Union[_SList, _Token]) -> Term:
        term = self.term(node)
        if not isinstance(term, Term):
            self.fail(node, "expected a plain or FG term")
        return term

    def formula(self, node: Union[_SList, _Token]) -> Formula:
        if isinstance(node, _Token):
            if node.text == "true" and not node.quoted:
                return TRUE
            if node.text == "false" and not node.quoted:
                return FALSE
            self.fail(node, "expected a formula")
        if not node.items or not isinstance(node.items[0], _Token):
            self.fail(node, "expected a formula head")
        head = node.items[0].text
        args = node.items[1:]
        if head == "not":
            self.arity(node, 1)
            return Not(self.formula(args[0]))
        if head in ("and", "or"):
            built = tuple(self.formula(a) for a in args)
            return And(built) if head == "and" else Or(built)
        if head in ("exists", "forall"):
            self.arity(node, 2)
            cls = Exists if head == "exists" else Forall
            return cls(self.var(args[0]), self.formula(args[1]))
        return self.atom(node, head, args)

    def atom(self, node: _SList, head: str, args: tuple) -> Formula:
        if head == "U":
            self.require(node, Signature.TREE)
            self.arity(node, 2)
            return UAtom(self.digits(args[0]), self.var(args[1]))
        if head == "B":
            self.require(node, Signature.TREE)
            self.arity(node, 4)
            sigma, tau = self.digits(args[0]), self.digits(args[1])
            if len(sigma) != len(tau):
                self.fail(node, "B strings must have equal length")
            return BAtom(sigma, tau, self.var(args[2]), self.var(args[3]))
        if head == "E":
            self.require(node, Signature.PAIR, Signature.EQ)
            self.arity(node, 2)
            return EAtom(self.plain_term(args[0]), self.plain_term(args[1]))
        if head == "=":
            self.arity(node, 2)
            left, right = self.term(args[0]), self.term(args[1])
            return EqAtom(left, right)
        if head in ("Cinit", "Cfin"):
            self.require(node, Signature.PAIR)
            self.arity(node, 2)
            kind = ClassKind.INIT if head == "Cinit" else ClassKind.FIN
            return ClassAtom(kind, self.number(args[0]), self.plain_term(args[1]))
        self.fail(node, f"unknown connective or predicate {head!r}")
        raise AssertionError("unreachable")


def parse_formula(text: str, sig: Signature) -> Formula:
    """
    Parse formula source text in the given signature.

    Bound variables are renamed apart when they clash with a free variable or an outer binder,
    so engines may assume distinct binders.

    Args:
        text: Formula source text.
        sig: Signature the formula must be written in.

    Returns:
        The parsed formula.

    Raises:
        FormulaSyntaxError: On malformed text, with line and column.
        SignatureError: If a construct does not belong to ``sig``.
    """
    source = _Input(text)
    source.skip_blank()
    if source.eof():
        raise FormulaSyntaxError("empty input", source.line, source.column)
    tree = _read(source)
    source.skip_blank()
    if not source.eof():
        source.error("trailing input")
    return rename_bound_apart(_Builder(sig).formula(tree))


# ─────────────────────────────────────────────
# Printer
# ─────────────────────────────────────────────


def term_to_sexpr(term: Union[Term, StarTerm]) -> str:
    """Print a single term, e.g. ``(app "fg" x)`` or ``(S 2 cinit)``."""
    if isinstance(term, StarTerm):
        return term.base if term.power == 0 else f"(S {term.power} {term.base})"
    return term.var if not term.word else f'(app "{term.word}" {term.var})'


def _print_atom(atom: Formula) -> str:
    if isinstance(atom, UAtom):
        return f'(U "{format_digits(atom.sigma)}" {atom.var})'
    if isinstance(atom, BAtom):
        sigma, tau = format_digits(atom.sigma), format_digits(atom.tau)
        return f'(B "{sigma}" "{tau}" {atom.left} {atom.right})'
    if isinstance(atom, EAtom):
        return f"(E {term_to_sexpr(atom.left)} {term_to_sexpr(atom.right)})"
    if isinstance(atom, EqAtom):
        return f"(= {term_to_sexpr(atom.left)} {term_to_sexpr(atom.right)})"
    if isinstance(atom, ClassAtom):
        return f"({atom.kind.value} {atom.index} {term_to_sexpr(atom.term)})"
    raise TypeError(f"Not an atom: {atom!r}")


def to_sexpr(f: Formula) -> str:
    """Print ``f`` in canonical single-space form accepted by :func:`parse_formula`."""
    if f == TRUE:
        return "true"
    if f == FALSE:
        return "false"
    if isinstance(f, Not):
        return f"(not {to_sexpr(f.body)})"
    if isinstance(f, And):
        return "(and " + " ".join(to_sexpr(a) for a in f.args) + ")"
    if isinstance(f, Or):
        return "(or " + " ".join(to_sexpr(a) for a in f.args) + ")"
    if isinstance(f, Exists):
        return f"(exists {f.var} {to_sexpr(f.body)})"
    if isinstance(f, Forall):
        return f"(forall {f.var} {to_sexpr(f.body)})"
    return _print_atom(f)

