# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Negation and disjunctive normal forms, literal splitting and the innermost-first QE driver."""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator

from pseudofinite_workbench.formula import (
    FALSE,
    And,
    Atom,
    EAtom,
    EqAtom,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    WorkbenchError,
    atom_vars,
    conj,
    disj,
    formula_size,
    is_atom,
    is_quantifier_free,
    mentions,
    neg,
)
from pseudofinite_workbench.logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_DNF_CAP = 10**6


class NormalForm(Enum):
    """Target shapes accepted by :func:`normalize`."""

    NNF = "nnf"
    DNF = "dnf"
    LITERAL_SPLIT = "literal_split"


class DnfCapExceeded(WorkbenchError):
    """Raised when a DNF expansion grows past the configured literal budget."""

    def __init__(self, cap: int, input_size: int):
        super().__init__(
            f"DNF expansion exceeded the cap of {cap} literals (input formula has "
            f"{input_size} nodes)"
        )
        self.cap = cap
        self.input_size = input_size


@dataclass(frozen=True)
class LiteralConjunction:
    """
    A conjunction of atoms and negated atoms.

    Attributes:
        positives: Atoms asserted true.
        negatives: Atoms asserted false.
        var: Optional distinguished variable; when set every literal mentions it.
    """

    positives: tuple[Atom, ...] = ()
    negatives: tuple[Atom, ...] = ()
    var: str | None = None

    def __post_init__(self) -> None:
        if self.var is None:
            return
        stray = [a for a in self.positives + self.negatives if self.var not in atom_vars(a)]
        if stray:
            raise ValueError(f"Literals {stray!r} do not mention {self.var!r}")

    def literals(self) -> Iterator[tuple[Atom, bool]]:
        """Yield ``(atom, polarity)`` pairs, positives first."""
        for atom in self.positives:
            yield atom, True
        for atom in self.negatives:
            yield atom, False

    def is_empty(self) -> bool:
        """Whether the conjunction has no literal at all."""
        return not self.positives and not self.negatives

    def to_formula(self) -> Formula:
        """The conjunction as a formula."""
        return conj(*self.positives, *(neg(a) for a in self.negatives))

    def partition(self, var: str) -> tuple["LiteralConjunction", Formula]:
        """Split into the literals mentioning ``var`` and the conjunction of the others."""
        inner_pos = tuple(a for a in self.positives if var in atom_vars(a))
        inner_neg = tuple(a for a in self.negatives if var in atom_vars(a))
        rest = conj(
            *(a for a in self.positives if var not in atom_vars(a)),
            *(neg(a) for a in self.negatives if var not in atom_vars(a)),
        )
        return LiteralConjunction(inner_pos, inner_neg, var), rest


def trivial_truth(atom: Atom) -> bool | None:
    """Truth value of reflexive atoms (``t = t``, ``t E t``), otherwise ``None``."""
    if isinstance(atom, (EqAtom, EAtom)) and atom.left == atom.right:
        return True
    return None


def to_nnf(f: Formula) -> Formula:
    """Push negations down to atoms; quantifiers are dualised on the way."""
    if is_atom(f):
        return f
    if isinstance(f, And):
        return conj(*(to_nnf(a) for a in f.args))
    if isinstance(f, Or):
        return disj(*(to_nnf(a) for a in f.args))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, to_nnf(f.body))
    body = f.body
    if is_atom(body):
        return f
    if isinstance(body, Not):
        return to_nnf(body.body)
    if isinstance(body, And):
        return disj(*(to_nnf(Not(a)) for a in body.args))
    if isinstance(body, Or):
        return conj(*(to_nnf(Not(a)) for a in body.args))
    if isinstance(body, Exists):
        return Forall(body.var, to_nnf(Not(body.body)))
    return Exists(body.var, to_nnf(Not(body.body)))


Clause = tuple[tuple[Atom, bool], ...]


def _merge(left: Clause, right: Clause) -> Clause | None:
    seen = dict.fromkeys(left)
    for literal in right:
        atom, polarity = literal
        if (atom, not polarity) in seen:
            return None
        seen.setdefault(literal, None)
    return tuple(seen)


def _clauses(nnf: Formula, cap: int, input_size: int) -> list[Clause]:
    if is_atom(nnf) or isinstance(nnf, Not):
        atom, polarity = (nnf.body, False) if isinstance(nnf, Not) else (nnf, True)
        truth = trivial_truth(atom)
        if truth is None:
            return [((atom, polarity),)]
        return [()] if truth == polarity else []
    if isinstance(nnf, Or):
        out: list[Clause] = []
        for arg in nnf.args:
            out.extend(_clauses(arg, cap, input_size))
        return out
    product: list[Clause] = [()]
    for arg in nnf.args:
        parts = _clauses(arg, cap, input_size)
        merged = []
        size = 0
        for left in product:
            for right in parts:
                clause = _merge(left, right)
                if clause is None:
                    continue
                size += len(clause)
                if size > cap:
                    raise DnfCapExceeded(cap, input_size)
                merged.append(clause)
        product = merged
        if not product:
            break
    return product


def literal_split(f: Formula, cap: int = DEFAULT_DNF_CAP) -> list[LiteralConjunction]:
    """
    Disjuncts of the DNF of a quantifier-free formula.

    Reflexive atoms are folded and clauses containing complementary literals are dropped.

    Args:
        f: A quantifier-free formula.
        cap: Maximum number of literal occurrences in the expansion.

    Returns:
        One LiteralConjunction per disjunct; an empty list means ``f`` is unsatisfiable.

    Raises:
        ValueError: If ``f`` has quantifiers.
        DnfCapExceeded: If the expansion grows past ``cap``.
    """
    if not is_quantifier_free(f):
        raise ValueError("DNF needs a quantifier-free formula")
    clauses = _clauses(to_nnf(f), cap, formula_size(f))
    out: dict[LiteralConjunction, None] = {}
    for clause in clauses:
        lc = LiteralConjunction(
            positives=tuple(a for a, p in clause if p),
            negatives=tuple(a for a, p in clause if not p),
        )
        out.setdefault(lc, None)
    return list(out)


def normalize(
    f: Formula, mode: NormalForm, cap: int = DEFAULT_DNF_CAP
) -> Formula | list[LiteralConjunction]:
    """
    Bring ``f`` into the requested normal form.

    Args:
        f: Formula to normalize; must be quantifier-free for DNF and LITERAL_SPLIT.
        mode: Target shape.
        cap: DNF literal budget.

    Returns:
        A formula for NNF and DNF, a list of LiteralConjunction for LITERAL_SPLIT.
    """
    if mode is NormalForm.NNF:
        return to_nnf(f)
    split = literal_split(f, cap)
    if mode is NormalForm.LITERAL_SPLIT:
        return split
    return disj(*(lc.to_formula() for lc in split)) if split else FALSE


ExistsEliminator = Callable[[LiteralConjunction], Formula]


def eliminate_innermost(
    f: Formula, eliminate_exists: ExistsEliminator, cap: int = DEFAULT_DNF_CAP
) -> Formula:
    """
    Remove every quantifier of ``f``, innermost first.

    ``forall`` is rewritten as ``not exists not``; the body of each ``exists`` is put in DNF and
    every disjunct is split into the literals mentioning the bound variable, which are handed to
    ``eliminate_exists``, and the rest, which is kept as is.

    Args:
        f: Any formula.
        eliminate_exists: Theory-specific eliminator for one literal conjunction.
        cap: DNF literal budget.

    Returns:
        A quantifier-free formula.
    """
    if is_atom(f):
        return f
    if isinstance(f, Not):
        return neg(eliminate_innermost(f.body, eliminate_exists, cap))
    if isinstance(f, (And, Or)):
        parts = [eliminate_innermost(a, eliminate_exists, cap) for a in f.args]
        return conj(*parts) if isinstance(f, And) else disj(*parts)
    if isinstance(f, Forall):
        dual = Exists(f.var, Not(f.body))
        return neg(eliminate_innermost(dual, eliminate_exists, cap))

    body = eliminate_innermost(f.body, eliminate_exists, cap)
    if not mentions(body, f.var):
        return body
    disjuncts = []
    clauses = literal_split(body, cap)
    logger.debug(f"Eliminating {f.var} from {len(clauses)} disjunct(s)")
    for lc in clauses:
        inner, rest = lc.partition(f.var)
        if inner.is_empty():
            disjuncts.append(rest)
            continue
        disjuncts.append(conj(rest, eliminate_exists(inner)))
    return disj(*disjuncts) if disjuncts else FALSE
