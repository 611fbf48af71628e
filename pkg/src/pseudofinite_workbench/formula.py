# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Formula values shared by every engine of the workbench.

Four signatures are supported:

- TREE: ``U_sigma(v)`` and ``B_{sigma,tau}(v, w)`` over digit strings, plus equality.
- PAIR: ``s(v) E t(w)``, ``s(v) = t(w)``, ``C_{init+k}(t(v))`` and ``C_{fin-k}(t(v))`` where
  ``s, t`` are words over ``f, g`` applied leftmost-outermost (``"fg"`` applied to ``x`` is
  ``f(g(x))``).
- STAR: ``S^k(u) = S^l(u')`` where ``u, u'`` are variables or the constants ``cinit``/``cfin``.
- EQ: ``v E w`` and ``v = w`` over plain variables.

All values are frozen dataclasses; the empty conjunction is truth and the empty disjunction is
falsity.
"""

import itertools
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Iterator, Union


class WorkbenchError(Exception):
    """Base class for every error raised by the workbench engines."""


class SignatureError(WorkbenchError):
    """Raised when an atom does not belong to the requested signature."""


class Signature(Enum):
    """The four vocabularies a formula can be written in."""

    TREE = "tree"
    PAIR = "pair"
    STAR = "star"
    EQ = "eq"


class Alphabet(Enum):
    """Letters a symbol string is drawn from."""

    DIGITS = "digits"
    FG = "fg"


class ClassKind(Enum):
    """The two families of named equivalence classes of the pairing theory."""

    INIT = "Cinit"
    FIN = "Cfin"


# Digit strings are tuples of nonnegative integers, FG strings are plain ``str`` over "fg".
DigitString = tuple[int, ...]
FGString = str

CINIT = "cinit"
CFIN = "cfin"
STAR_CONSTANTS = (CINIT, CFIN)


def check_symbols(alphabet: Alphabet, symbols: DigitString | FGString) -> None:
    """
    Validate the letters of a symbol string.

    Args:
        alphabet: The alphabet the string must be drawn from.
        symbols: The string to validate. The empty string is always valid.

    Raises:
        ValueError: If a letter is outside the alphabet.
    """
    if alphabet is Alphabet.FG:
        bad = [letter for letter in symbols if letter not in ("f", "g")]
    else:
        bad = [letter for letter in symbols if not isinstance(letter, int) or letter < 0]
    if bad:
        raise ValueError(f"Invalid {alphabet.value} letters {bad!r} in {symbols!r}")


def parse_digits(text: str) -> DigitString:
    """Parse a comma-separated digit string such as ``"0,12,3"``; ``""`` is the empty string."""
    if not text.strip():
        return ()
    try:
        sigma = tuple(int(part) for part in text.split(","))
    except ValueError as e:
        raise ValueError(f"Invalid digit string: {text!r}") from e
    check_symbols(Alphabet.DIGITS, sigma)
    return sigma


def format_digits(sigma: DigitString) -> str:
    """Inverse of :func:`parse_digits`."""
    return ",".join(str(letter) for letter in sigma)


# ─────────────────────────────────────────────
# Terms
# ─────────────────────────────────────────────


@dataclass(frozen=True)
class Term:
    """An FG word applied to a variable; the empty word is the variable itself."""

    var: str
    word: FGString = ""

    def __post_init__(self) -> None:
        check_symbols(Alphabet.FG, self.word)

    @property
    def depth(self) -> int:
        """Number of function applications in the term."""
        return len(self.word)

    def under(self, prefix: FGString) -> "Term":
        """Return ``prefix(self)``, i.e. the term with more applications outside."""
        return Term(self.var, prefix + self.word)


@dataclass(frozen=True)
class StarTerm:
    """``S^power`` applied to a variable or to one of the constants ``cinit``/``cfin``."""

    base: str
    power: int = 0

    def __post_init__(self) -> None:
        if self.power < 0:
            raise ValueError(f"Negative power in S-term: {self.power}")
        if self.base == CFIN and self.power:
            # S fixes c_fin
            object.__setattr__(self, "power", 0)

    @property
    def is_constant(self) -> bool:
        """Whether the base is ``cinit`` or ``cfin``."""
        return self.base in STAR_CONSTANTS

    def shifted(self, extra: int) -> "StarTerm":
        """Return ``S^extra`` applied to this term."""
        return StarTerm(self.base, self.power + extra)


# ─────────────────────────────────────────────
# Atoms
# ─────────────────────────────────────────────


@dataclass(frozen=True)
class UAtom:
    """``U_sigma(var)``."""

    sigma: DigitString
    var: str


@dataclass(frozen=True)
class BAtom:
    """``B_{sigma,tau}(left, right)`` with ``|sigma| = |tau|``."""

    sigma: DigitString
    tau: DigitString
    left: str
    right: str

    def __post_init__(self) -> None:
        if len(self.sigma) != len(self.tau):
            raise ValueError(
                f"B strings must have equal length: {format_digits(self.sigma)!r} "
                f"vs {format_digits(self.tau)!r}"
            )


@dataclass(frozen=True)
class EAtom:
    """``left E right``."""

    left: Term
    right: Term


@dataclass(frozen=True)
class EqAtom:
    """``left = right`` over plain, FG or S-terms."""

    left: Union[Term, StarTerm]
    right: Union[Term, StarTerm]


@dataclass(frozen=True)
class ClassAtom:
    """``C_{init+index}(term)`` or ``C_{fin-index}(term)``."""

    kind: ClassKind
    index: int
    term: Term


Atom = Union[UAtom, BAtom, EAtom, EqAtom, ClassAtom]
ATOM_TYPES = (UAtom, BAtom, EAtom, EqAtom, ClassAtom)


# ─────────────────────────────────────────────
# Connectives
# ─────────────────────────────────────────────


@dataclass(frozen=True)
class Not:
    """Negation."""

    body: "Formula"


@dataclass(frozen=True)
class And:
    """Conjunction; ``And(())`` is truth."""

    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    """Disjunction; ``Or(())`` is falsity."""

    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Exists:
    """Existential quantification of a single variable."""

    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    """Universal quantification of a single variable."""

    var: str
    body: "Formula"


Formula = Union[UAtom, BAtom, EAtom, EqAtom, ClassAtom, Not, And, Or, Exists, Forall]

TRUE: Formula = And(())
FALSE: Formula = Or(())


def is_atom(f: Formula) -> bool:
    """Whether ``f`` is an atomic formula."""
    return isinstance(f, ATOM_TYPES)


# ─────────────────────────────────────────────
# Variables
# ─────────────────────────────────────────────


def _term_vars(term: Union[Term, StarTerm]) -> tuple[str, ...]:
    if isinstance(term, StarTerm):
        return () if term.is_constant else (term.base,)
    return (term.var,)


def atom_vars(atom: Atom) -> tuple[str, ...]:
    """Variables of an atom in left-to-right order, with repetitions."""
    if isinstance(atom, UAtom):
        return (atom.var,)
    if isinstance(atom, BAtom):
        return (atom.left, atom.right)
    if isinstance(atom, ClassAtom):
        return (atom.term.var,)
    return _term_vars(atom.left) + _term_vars(atom.right)


def free_vars(f: Formula) -> tuple[str, ...]:
    """Free variables of ``f`` in order of first occurrence."""
    seen: dict[str, None] = {}

    def walk(g: Formula, bound: frozenset[str]) -> None:
        if is_atom(g):
            for v in atom_vars(g):
                if v not in bound:
                    seen.setdefault(v, None)
        elif isinstance(g, Not):
            walk(g.body, bound)
        elif isinstance(g, (And, Or)):
            for arg in g.args:
                walk(arg, bound)
        else:
            walk(g.body, bound | {g.var})

    walk(f, frozenset())
    return tuple(seen)


def mentions(f: Formula, var: str) -> bool:
    """Whether ``var`` occurs free in ``f``."""
    return var in free_vars(f)


def iter_atoms(f: Formula) -> Iterator[Atom]:
    """Yield every atom occurrence of ``f``."""
    if is_atom(f):
        yield f
    elif isinstance(f, Not):
        yield from iter_atoms(f.body)
    elif isinstance(f, (And, Or)):
        for arg in f.args:
            yield from iter_atoms(arg)
    else:
        yield from iter_atoms(f.body)


def is_quantifier_free(f: Formula) -> bool:
    """Whether ``f`` contains no quantifier node."""
    if is_atom(f):
        return True
    if isinstance(f, Not):
        return is_quantifier_free(f.body)
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(arg) for arg in f.args)
    return False


def formula_size(f: Formula) -> int:
    """Number of nodes of ``f``."""
    if is_atom(f):
        return 1
    if isinstance(f, Not):
        return 1 + formula_size(f.body)
    if isinstance(f, (And, Or)):
        return 1 + sum(formula_size(arg) for arg in f.args)
    return 1 + formula_size(f.body)


def rename_atom(atom: Atom, env: dict[str, str]) -> Atom:
    """Rename the variables of an atom; variables missing from ``env`` are kept."""

    def term(t: Union[Term, StarTerm]) -> Union[Term, StarTerm]:
        if isinstance(t, StarTerm):
            return t if t.is_constant else replace(t, base=env.get(t.base, t.base))
        return replace(t, var=env.get(t.var, t.var))

    if isinstance(atom, UAtom):
        return replace(atom, var=env.get(atom.var, atom.var))
    if isinstance(atom, BAtom):
        return replace(
            atom, left=env.get(atom.left, atom.left), right=env.get(atom.right, atom.right)
        )
    if isinstance(atom, ClassAtom):
        return replace(atom, term=term(atom.term))
    return replace(atom, left=term(atom.left), right=term(atom.right))


def map_atoms(f: Formula, fn: Callable[[Atom], Formula]) -> Formula:
    """Rebuild ``f`` with every atom replaced by ``fn(atom)``; binders are kept as they are."""
    if is_atom(f):
        return fn(f)
    if isinstance(f, Not):
        return neg(map_atoms(f.body, fn))
    if isinstance(f, And):
        return conj(*(map_atoms(arg, fn) for arg in f.args))
    if isinstance(f, Or):
        return disj(*(map_atoms(arg, fn) for arg in f.args))
    return type(f)(f.var, map_atoms(f.body, fn))


def rename_free(f: Formula, env: dict[str, str]) -> Formula:
    """
    Rename free variables of ``f`` according to ``env``.

    Binders that would capture a renamed variable are themselves renamed apart first.
    """
    targets = set(env.values())

    def walk(g: Formula, local: dict[str, str]) -> Formula:
        if is_atom(g):
            return rename_atom(g, local)
        if isinstance(g, Not):
            return Not(walk(g.body, local))
        if isinstance(g, (And, Or)):
            return type(g)(tuple(walk(arg, local) for arg in g.args))
        inner = {k: v for k, v in local.items() if k != g.var}
        var = g.var
        if var in targets:
            var = fresh_name(var, targets | set(free_vars(g.body)))
            inner[g.var] = var
        return type(g)(var, walk(g.body, inner))

    return walk(f, dict(env))


def fresh_name(base: str, used: set[str] | frozenset[str]) -> str:
    """Return ``base_1``, ``base_2``, ... whichever is first not in ``used``."""
    stem = base.split("_")[0] or "v"
    for i in itertools.count(1):
        candidate = f"{stem}_{i}"
        if candidate not in used:
            return candidate
    raise AssertionError("unreachable")


def rename_bound_apart(f: Formula) -> Formula:
    """
    Rename binders so that each binds a distinct variable that is never free in ``f``.

    Binders that already satisfy this keep their names, so well-formed input round-trips unchanged.
    """
    used: set[str] = set(free_vars(f))

    def walk(g: Formula, env: dict[str, str]) -> Formula:
        if is_atom(g):
            return rename_atom(g, env)
        if isinstance(g, Not):
            return Not(walk(g.body, env))
        if isinstance(g, (And, Or)):
            return type(g)(tuple(walk(arg, env) for arg in g.args))
        var = g.var if g.var not in used else fresh_name(g.var, used)
        used.add(var)
        return type(g)(var, walk(g.body, {**env, g.var: var}))

    return walk(f, {})


# ─────────────────────────────────────────────
# Signatures
# ─────────────────────────────────────────────

_PLAIN = frozenset({Signature.TREE, Signature.PAIR, Signature.EQ})


def atom_signatures(atom: Atom) -> frozenset[Signature]:
    """Signatures in which ``atom`` is well formed."""
    if isinstance(atom, (UAtom, BAtom)):
        return frozenset({Signature.TREE})
    if isinstance(atom, ClassAtom):
        return frozenset({Signature.PAIR})
    if isinstance(atom.left, StarTerm) or isinstance(atom.right, StarTerm):
        return frozenset({Signature.STAR})
    plain = not atom.left.word and not atom.right.word
    if isinstance(atom, EAtom):
        return frozenset({Signature.PAIR, Signature.EQ}) if plain else frozenset({Signature.PAIR})
    return _PLAIN if plain else frozenset({Signature.PAIR})


def check_signature(f: Formula, sig: Signature) -> None:
    """
    Ensure every atom of ``f`` belongs to ``sig``.

    Raises:
        SignatureError: On the first atom outside the signature.
    """
    for atom in iter_atoms(f):
        if sig not in atom_signatures(atom):
            raise SignatureError(f"Atom {atom!r} is not in signature {sig.value}")


# ─────────────────────────────────────────────
# Smart constructors
# ─────────────────────────────────────────────


def neg(f: Formula) -> Formula:
    """Negate ``f``, folding double negations and the two constants."""
    if f == TRUE:
        return FALSE
    if f == FALSE:
        return TRUE
    if isinstance(f, Not):
        return f.body
    return Not(f)


def _gather(kind: type, fs: tuple[Formula, ...]) -> list[Formula]:
    out: dict[Formula, None] = {}
    for f in fs:
        for g in f.args if isinstance(f, kind) else (f,):
            out.setdefault(g, None)
    return list(out)


def conj(*fs: Formula) -> Formula:
    """Flattened, deduplicated conjunction; complementary literals collapse to falsity."""
    args = _gather(And, fs)
    if not args:
        return TRUE
    if FALSE in args:
        return FALSE
    present = set(args)
    if any(isinstance(a, Not) and a.body in present for a in args):
        return FALSE
    return args[0] if len(args) == 1 else And(tuple(args))


def disj(*fs: Formula) -> Formula:
    """Flattened, deduplicated disjunction; complementary literals collapse to truth."""
    args = _gather(Or, fs)
    if not args:
        return FALSE
    if TRUE in args:
        return TRUE
    present = set(args)
    if any(isinstance(a, Not) and a.body in present for a in args):
        return TRUE
    return args[0] if len(args) == 1 else Or(tuple(args))


def implies(a: Formula, b: Formula) -> Formula:
    """``a -> b`` as ``not a or b``."""
    return disj(neg(a), b)
