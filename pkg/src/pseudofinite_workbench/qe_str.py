# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Existential elimination for the tree-of-bijections theory.

A conjunction of literals in ``x`` is brought to the shape

    U_s(x) & ~U_{s t_1}(x) & ... & B_{s,r_i}(x, y_i) & ... & ~B_{s,q_j}(x, z_j)

where every link starts at the same deepest sort ``s``. Once one positive link pins ``x``
down, the existential is equivalent to conditions on the first linked parameter.
"""

from dataclasses import dataclass

from pseudofinite_workbench.formula import (
    FALSE,
    TRUE,
    Atom,
    BAtom,
    DigitString,
    EqAtom,
    Formula,
    UAtom,
    conj,
    disj,
    neg,
)
from pseudofinite_workbench.logger import setup_logger
from pseudofinite_workbench.normal_forms import LiteralConjunction

logger = setup_logger(__name__)

Link = tuple[DigitString, str]


@dataclass(frozen=True)
class StrCanonicalForm:
    """
    A satisfiable-looking conjunction on ``x`` in normal shape.

    Attributes:
        var: The variable being eliminated.
        base: The deepest sort ``x`` is asserted to lie in.
        refinements: Full strings ``base + tau`` of the excluded subsorts.
        positive_links: ``(rho, y)`` for each ``B_{base,rho}(x, y)``.
        negative_links: ``(theta, z)`` for each ``~B_{base,theta}(x, z)``.
    """

    var: str
    base: DigitString
    refinements: tuple[DigitString, ...] = ()
    positive_links: tuple[Link, ...] = ()
    negative_links: tuple[Link, ...] = ()

    def to_formula(self) -> Formula:
        """The conjunction this form stands for."""
        x = self.var
        return conj(
            UAtom(self.base, x),
            *(neg(UAtom(r, x)) for r in self.refinements),
            *(BAtom(self.base, rho, x, y) for rho, y in self.positive_links),
            *(neg(BAtom(self.base, theta, x, z)) for theta, z in self.negative_links),
        )


def _is_prefix(short: DigitString, long: DigitString) -> bool:
    return len(short) <= len(long) and long[: len(short)] == short


def _comparable(a: DigitString, b: DigitString) -> bool:
    return _is_prefix(a, b) or _is_prefix(b, a)


def _bond(sigma: DigitString, tau: DigitString, left: str, right: str) -> Formula:
    """``B_{sigma,tau}(left, right)``, folded when both sides are the same variable."""
    if left == right:
        return UAtom(sigma, left) if sigma == tau else FALSE
    return BAtom(sigma, tau, left, right)


def _oriented(atom: Atom, x: str) -> tuple[str, DigitString, tuple | None]:
    """
    Classify a literal's atom relative to ``x``.

    Returns ``("sort", sigma, None)`` for a constraint on ``x`` alone,
    ``("link", sigma, (rho, y))`` for a bond from ``x`` to a parameter, and
    ``("false", (), None)`` for an atom that never holds.
    """
    if isinstance(atom, UAtom):
        return "sort", atom.sigma, None
    if isinstance(atom, EqAtom):
        left, right = atom.left.var, atom.right.var
        if left == right:
            return "sort", (), None
        return "link", (), ((), right if left == x else left)
    if isinstance(atom, BAtom):
        if atom.left == atom.right:
            return ("sort", atom.sigma, None) if atom.sigma == atom.tau else ("false", (), None)
        if atom.left == x:
            return "link", atom.sigma, (atom.tau, atom.right)
        return "link", atom.tau, (atom.sigma, atom.left)
    raise TypeError(f"Atom {atom!r} is not in the tree signature")


def _base(lc: LiteralConjunction) -> DigitString | None:
    """Deepest positive source, or ``None`` when two sources are incomparable or one is false."""
    base: DigitString = ()
    for atom in lc.positives:
        kind, sigma, _ = _oriented(atom, lc.var)
        if kind == "false":
            return None
        if _is_prefix(base, sigma):
            base = sigma
        elif not _is_prefix(sigma, base):
            return None
    return base


def split_str_conjunction(lc: LiteralConjunction) -> list[LiteralConjunction]:
    """
    Case-split until no negative link starts below the base sort.

    A negative link ``~B_{theta',theta}(x, z)`` with ``theta'`` strictly extending the base holds
    trivially when ``x`` is outside ``U_theta'``; otherwise ``theta'`` becomes the new base. The
    branches are mutually exclusive and their disjunction is equivalent to ``lc``.

    Returns:
        The branches; unsatisfiable ones are dropped.
    """
    if lc.var is None:
        raise ValueError("A distinguished variable is required")
    base = _base(lc)
    if base is None:
        return []
    for atom in lc.negatives:
        kind, source, _ = _oriented(atom, lc.var)
        if kind != "link" or len(source) <= len(base) or not _is_prefix(base, source):
            continue
        outside = LiteralConjunction(
            lc.positives,
            tuple(a for a in lc.negatives if a != atom) + (UAtom(source, lc.var),),
            lc.var,
        )
        inside = LiteralConjunction(
            lc.positives + (UAtom(source, lc.var),), lc.negatives, lc.var
        )
        return split_str_conjunction(outside) + split_str_conjunction(inside)
    return [lc]


def normalize_str_conjunction(lc: LiteralConjunction) -> StrCanonicalForm | None:
    """
    Rewrite a split conjunction on ``x`` into canonical form.

    Positive sorts merge into the deepest one; positive and negative bonds are lifted to start at
    that base (``B_{s,r}(x,y)`` with ``base = s p`` becomes ``B_{base,r p}(x,y)``); ``x = y`` is
    the bond ``B_{(),()}``; bonds written from the parameter side are flipped.

    Args:
        lc: Literals all mentioning ``lc.var``, already passed through
            :func:`split_str_conjunction`.

    Returns:
        The canonical form, or ``None`` when the conjunction is unsatisfiable.

    Raises:
        ValueError: If a negative bond still starts below the base.
    """
    x = lc.var
    if x is None:
        raise ValueError("A distinguished variable is required")
    base = _base(lc)
    if base is None:
        return None

    positive: dict[Link, None] = {}
    for atom in lc.positives:
        kind, source, link = _oriented(atom, x)
        if kind == "link":
            rho, y = link
            positive.setdefault((rho + base[len(source) :], y), None)

    refinements: dict[DigitString, None] = {}
    negative: dict[Link, None] = {}
    for atom in lc.negatives:
        kind, source, link = _oriented(atom, x)
        if kind == "false" or not _comparable(source, base):
            continue
        if kind == "sort":
            if _is_prefix(source, base):
                return None
            refinements.setdefault(source, None)
            continue
        if not _is_prefix(source, base):
            raise ValueError(f"Negative bond {atom!r} starts below {base!r}; split first")
        theta, z = link
        negative.setdefault((theta + base[len(source) :], z), None)

    return StrCanonicalForm(x, base, tuple(refinements), tuple(positive), tuple(negative))


def eliminate_canonical(form: StrCanonicalForm, completed: bool = True) -> Formula:
    """
    Quantifier-free equivalent of ``exists x`` over a canonical form.

    With a positive link ``(rho_1, b_1)``, ``x`` is the image of ``b_1`` and the result is:

    - ``B_{rho_1,rho_i}(b_1, b_i)`` for the other positive links,
    - ``~B_{rho_1,theta_j}(b_1, c_j)`` for the negative links,
    - ``~U_{rho_1 tau}(b_1)`` for each refinement ``base tau``,
    - and, when ``completed``, ``U_{rho_i}(b_i)`` for every positive link.

    Without a positive link the sort has infinitely many elements outside any finite exclusion,
    so the result is truth.
    """
    if not form.positive_links:
        return TRUE
    (rho, b), *others = form.positive_links
    depth = len(form.base)
    parts = []
    if completed:
        parts.extend(UAtom(r, y) for r, y in form.positive_links)
    parts.extend(_bond(rho, r, b, y) for r, y in others)
    parts.extend(neg(_bond(rho, theta, b, z)) for theta, z in form.negative_links)
    parts.extend(neg(UAtom(rho + tau[depth:], b)) for tau in form.refinements)
    return conj(*parts)


def eliminate_exists_str(lc: LiteralConjunction, completed: bool = True) -> Formula:
    """
    Quantifier-free equivalent of ``exists x`` over a conjunction of literals in ``x``.

    Args:
        lc: Tree-signature literals, each mentioning ``lc.var``.
        completed: Include the sort conditions on the linked parameters. Without them the output
            is the bare three-condition list, which is weaker when a single link is present.

    Returns:
        A formula in the parameters only; falsity for an unsatisfiable conjunction.
    """
    branches = split_str_conjunction(lc)
    out = []
    for branch in branches:
        form = normalize_str_conjunction(branch)
        if form is not None:
            out.append(eliminate_canonical(form, completed))
    logger.debug(f"Eliminated {lc.var} over {len(branches)} branch(es)")
    return disj(*out)
