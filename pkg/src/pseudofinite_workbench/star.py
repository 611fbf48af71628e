# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""The successor theory on the quotient of a pairing structure.

Classes of the pairing theory form a discrete order with a first class ``cinit`` and a last
class ``cfin`` that ``S`` fixes. Equivalence formulas (no ``=`` between pair terms) translate into
this language, have their quantifiers removed here, and translate back.

Elimination is exact on every interval ``{0..L}`` with ``S(L) = L`` and on the infinite model.
"""

from functools import partial
from typing import Callable

from pseudofinite_workbench.formula import (
    CFIN,
    CINIT,
    FALSE,
    TRUE,
    Atom,
    ClassAtom,
    ClassKind,
    EAtom,
    EqAtom,
    Formula,
    Signature,
    StarTerm,
    Term,
    WorkbenchError,
    check_signature,
    conj,
    disj,
    map_atoms,
    neg,
    rename_bound_apart,
)
from pseudofinite_workbench.logger import setup_logger
from pseudofinite_workbench.normal_forms import (
    DEFAULT_DNF_CAP,
    LiteralConjunction,
    eliminate_innermost,
)

logger = setup_logger(__name__)

FIN = StarTerm(CFIN)

# ``(c, R)`` stands for ``S^c(x) = R`` with ``R`` free of ``x``.
Shift = tuple[int, StarTerm]
Rewrite = Callable[[int, StarTerm], Formula]


class EquivalenceFormulaError(WorkbenchError):
    """Raised when a formula handed to the class-level translation contains an equality atom."""


def star_eq(left: StarTerm, right: StarTerm) -> Formula:
    """``left = right`` with syntactically equal sides folded to truth and sides ordered."""
    if left == right:
        return TRUE
    if (left.base, left.power) > (right.base, right.power):
        left, right = right, left
    return EqAtom(left, right)


def initial(power: int) -> StarTerm:
    """``S^power(cinit)``."""
    return StarTerm(CINIT, power)


def length_is(length: int) -> Formula:
    """Closed formula saying the interval is ``{0..length}``."""
    if length == 0:
        return star_eq(initial(0), FIN)
    return conj(star_eq(initial(length), FIN), neg(star_eq(initial(length - 1), FIN)))


# ─────────────────────────────────────────────
# Elimination
# ─────────────────────────────────────────────


def _orient(atom: Atom, x: str) -> Shift | None:
    """Read ``atom`` as ``S^c(x) = R``; ``None`` when it holds identically."""
    if not isinstance(atom, EqAtom) or not isinstance(atom.left, StarTerm):
        raise TypeError(f"Atom {atom!r} is not in the successor signature")
    left, right = atom.left, atom.right
    if left.base != x:
        left, right = right, left
    if right.base != x:
        return left.power, right
    if left.power == right.power:
        return None
    # S^a(x) = S^b(x) with a < b forces S^a(x) onto the fixed point
    return min(left.power, right.power), FIN


def _substitute(literals: list[tuple[Shift, bool]], rewrite: Rewrite) -> Formula:
    parts = []
    for (power, rhs), polarity in literals:
        f = rewrite(power, rhs)
        parts.append(f if polarity else neg(f))
    return conj(*parts)


def _at_term(value: StarTerm, power: int, rhs: StarTerm) -> Formula:
    # x := value
    return star_eq(value.shifted(power), rhs)


def _at_predecessor(steps: int, target: StarTerm, power: int, rhs: StarTerm) -> Formula:
    # x is the unique element with S^steps(x) = target, target not the fixed point
    if power >= steps:
        return star_eq(target.shifted(power - steps), rhs)
    return star_eq(rhs.shifted(steps - power), target)


def _below_fin(steps: int, power: int, rhs: StarTerm) -> Formula:
    # x is the element ``steps`` places before cfin
    if power >= steps:
        return star_eq(rhs, FIN)
    gap = steps - power
    return conj(star_eq(rhs.shifted(gap), FIN), neg(star_eq(rhs.shifted(gap - 1), FIN)))


def _avoiding(literals: list[tuple[Shift, bool]]) -> Formula:
    """``exists x`` over negative literals only."""
    if not literals:
        return TRUE
    # S^c(x) = R has at most c + 1 solutions
    bound = sum(power + 1 for (power, _), _ in literals)
    short = []
    for length in range(bound):
        options = [
            _substitute(literals, partial(_at_term, initial(j))) for j in range(length + 1)
        ]
        short.append(conj(length_is(length), disj(*options)))
    return disj(neg(star_eq(initial(bound - 1), FIN)), *short)


def eliminate_exists_star(lc: LiteralConjunction) -> Formula:
    """
    Quantifier-free equivalent of ``exists x`` over successor literals that all mention ``x``.

    With a positive literal ``S^a(x) = T`` (smallest ``a``), ``x`` is either the ``a``-th
    predecessor of ``T`` (when ``T`` is not ``cfin`` and lies at least ``a`` steps above
    ``cinit``) or, when ``T = cfin``, one of ``cfin`` and its first ``a`` predecessors; each case
    substitutes ``x`` away. Without positive literals, an interval longer than the number of
    excluded points always has a witness and shorter ones are enumerated.
    """
    x = lc.var
    literals: list[tuple[Shift, bool]] = []
    for atom, polarity in lc.literals():
        shift = _orient(atom, x)
        if shift is None:
            if not polarity:
                return FALSE
            continue
        literals.append((shift, polarity))

    positives = [shift for shift, polarity in literals if polarity]
    if not positives:
        logger.debug(f"Eliminating {x} from {len(literals)} negative literal(s)")
        return _avoiding(literals)

    steps, target = min(positives, key=lambda shift: shift[0])
    if steps == 0:
        return _substitute(literals, partial(_at_term, target))

    generic = conj(
        neg(star_eq(target, FIN)),
        *(neg(star_eq(target, initial(j))) for j in range(steps)),
        _substitute(literals, partial(_at_predecessor, steps, target)),
    )
    at_fin = [_substitute(literals, partial(_at_term, FIN))]
    for j in range(1, steps + 1):
        at_fin.append(
            conj(
                neg(star_eq(initial(j - 1), FIN)),
                _substitute(literals, partial(_below_fin, j)),
            )
        )
    return disj(generic, conj(star_eq(target, FIN), disj(*at_fin)))


def qe_star(f: Formula, cap: int = DEFAULT_DNF_CAP) -> Formula:
    """
    Remove every quantifier from a successor-signature formula.

    Args:
        f: A formula over ``S``, ``cinit`` and ``cfin``.
        cap: DNF literal budget.

    Returns:
        A quantifier-free formula equivalent to ``f`` on every finite interval and on the
        infinite model.

    Raises:
        SignatureError: If ``f`` is not in the successor signature.
        DnfCapExceeded: If a DNF expansion grows past ``cap``.
    """
    check_signature(f, Signature.STAR)
    return eliminate_innermost(rename_bound_apart(f), eliminate_exists_star, cap)


# ─────────────────────────────────────────────
# Translation to and from the pairing language
# ─────────────────────────────────────────────


def _translate_atom(atom: Atom) -> Formula:
    if isinstance(atom, EAtom):
        return star_eq(
            StarTerm(atom.left.var, atom.left.depth), StarTerm(atom.right.var, atom.right.depth)
        )
    if isinstance(atom, ClassAtom):
        term = StarTerm(atom.term.var, atom.term.depth)
        if atom.kind is ClassKind.INIT:
            return star_eq(initial(atom.index), term)
        at_fin = star_eq(term.shifted(atom.index), FIN)
        if atom.index == 0:
            return at_fin
        return conj(at_fin, neg(star_eq(term.shifted(atom.index - 1), FIN)))
    raise EquivalenceFormulaError(f"Atom {atom!r} is not an equivalence atom")


def translate_to_star(f: Formula) -> Formula:
    """
    Translate an equivalence formula to the successor language of the class quotient.

    ``s(x) E t(y)`` becomes ``S^|s|(x) = S^|t|(y)``, ``C_{init+k}(t(x))`` becomes
    ``S^k(cinit) = S^|t|(x)`` and ``C_{fin-k}(t(x))`` says ``S^|t|(x)`` is exactly ``k`` steps
    below ``cfin``. Variables keep their names and now range over classes.

    Raises:
        EquivalenceFormulaError: If ``f`` contains an equality atom.
    """
    return map_atoms(f, _translate_atom)


def _closed_value(term: StarTerm, fin: int) -> int:
    start = 0 if term.base == CINIT else fin
    return min(start + term.power, fin)


def _pull_back_atom(atom: Atom, fin: int | None = None) -> Formula:
    left, right = atom.left, atom.right
    if left.is_constant and not right.is_constant:
        left, right = right, left
    if not left.is_constant and not right.is_constant:
        return EAtom(Term(left.base, "f" * left.power), Term(right.base, "f" * right.power))
    if not left.is_constant:
        term = Term(left.base, "f" * left.power)
        if right.base == CFIN:
            return ClassAtom(ClassKind.FIN, 0, term)
        return ClassAtom(ClassKind.INIT, right.power, term)
    if fin is not None:
        return TRUE if _closed_value(left, fin) == _closed_value(right, fin) else FALSE
    # the infinite model, where the chain from cinit never meets cfin
    return TRUE if left == right else FALSE


def pull_back(f: Formula, fin: int | None = None) -> Formula:
    """
    Translate a successor formula back to the pairing language.

    ``S^a(u) = S^b(v)`` becomes ``f^a(u) E f^b(v)``, ``S^a(u) = S^b(cinit)`` becomes
    ``C_{init+b}(f^a(u))`` and ``S^a(u) = cfin`` becomes ``C_fin(f^a(u))``.

    Args:
        f: A successor formula.
        fin: Index of ``cfin`` in a finite quotient. Closed atoms have no pairing counterpart;
            they are decided on ``{0..fin}`` when given and in the infinite model otherwise.
    """
    return map_atoms(f, partial(_pull_back_atom, fin=fin))
