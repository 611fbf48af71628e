# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Definable polynomial cardinality and existential elimination for the pairing theory.

An element below ``C_fin`` is determined by its images under all words of a fixed length ``k``,
so equations ``s(x) = t(y)`` become constraints on the ``2^k`` coordinates of ``x``. Counting
free coordinates gives the size of the solution set as a polynomial in the size ``X`` of one
anchor class; the class-level remainder of a conjunction is an equivalence formula, handled in
:mod:`pseudofinite_workbench.star`.
"""

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

import sympy as sp

from pseudofinite_workbench.counting import (
    PAIR_ANCHOR,
    CardCase,
    CountTerm,
    card,
    eval_card_expr,
    exclusive_cases,
    format_card_expr,
    signed_subset_terms,
)
from pseudofinite_workbench.formula import (
    FALSE,
    TRUE,
    Atom,
    ClassAtom,
    ClassKind,
    EAtom,
    EqAtom,
    Exists,
    FGString,
    Formula,
    Term,
    WorkbenchError,
    atom_vars,
    conj,
    disj,
    free_vars,
    fresh_name,
    is_quantifier_free,
    iter_atoms,
    map_atoms,
    neg,
    rename_free,
)
from pseudofinite_workbench.logger import setup_logger
from pseudofinite_workbench.models import (
    Assignment,
    Element,
    PairModel,
    build_model,
    evaluate,
    pair_class_size,
)
from pseudofinite_workbench.normal_forms import (
    DEFAULT_DNF_CAP,
    DnfCapExceeded,
    LiteralConjunction,
    literal_split,
)
from pseudofinite_workbench.sexpr import term_to_sexpr, to_sexpr
from pseudofinite_workbench.star import pull_back, qe_star, translate_to_star

logger = setup_logger(__name__)


class ZeroPolynomialError(WorkbenchError):
    """Raised when a cardinality definition contains a case whose polynomial is zero."""


def words(length: int) -> list[FGString]:
    """All FG words of ``length``, ``f`` before ``g``."""
    return ["".join(letters) for letters in itertools.product("fg", repeat=length)]


def suffix(word: FGString, length: int) -> FGString:
    """The ``length`` innermost letters of ``word``."""
    return word[len(word) - length :]


def _block_index(word: FGString) -> int:
    # the innermost letter picks the half, so it is the most significant bit
    index = 0
    for letter in reversed(word):
        index = 2 * index + (letter == "g")
    return index


def _merge_classes(items: Iterable, pairs: Iterable[tuple]) -> dict:
    parent = {item: item for item in items}

    def find(item):
        while parent[item] != item:
            parent[item] = parent[parent[item]]
            item = parent[item]
        return item

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
    return {item: find(item) for item in parent}


def pair_atom(atom: Atom) -> Formula:
    """Fold atoms whose truth does not depend on the structure beyond the axioms."""
    if isinstance(atom, EqAtom) and atom.left == atom.right:
        return TRUE
    if isinstance(atom, EAtom) and atom.left.var == atom.right.var:
        short, long = sorted((atom.left, atom.right), key=lambda t: t.depth)
        if short.depth == long.depth:
            return TRUE
        # the longer image can only catch up on the fixed class
        return ClassAtom(ClassKind.FIN, 0, short)
    return atom


def _settle_on_fin(lc: LiteralConjunction) -> Formula:
    """
    The clause with every term collapsed onto a term it asserts to be in ``C_fin``.

    ``f`` and ``g`` fix ``C_fin``, so ``C_fin(t(y))`` makes ``ut(y)`` equal to ``t(y)``.
    """
    fixed = sorted(
        (
            a.term
            for a in lc.positives
            if isinstance(a, ClassAtom) and a.kind is ClassKind.FIN and a.index == 0
        ),
        key=lambda t: t.depth,
    )

    def settle(term: Term) -> Term:
        return next(
            (t for t in fixed if t.var == term.var and term.word.endswith(t.word)), term
        )

    def reduce(atom: Atom) -> Formula:
        if isinstance(atom, EqAtom):
            return pair_atom(EqAtom(settle(atom.left), settle(atom.right)))
        return atom

    return conj(*(reduce(a) for a in lc.positives), *(neg(reduce(a)) for a in lc.negatives))


def _class_literal(var: str, cls: int, length: int) -> ClassAtom:
    if cls <= length - cls:
        return ClassAtom(ClassKind.INIT, cls, Term(var))
    return ClassAtom(ClassKind.FIN, length - cls, Term(var))


def _by_classes(f: Formula, var: str, fin: int | None) -> Formula:
    """
    ``f`` as the list of classes of ``var`` it holds on.

    An equivalence formula in one variable only sees the class of that variable. In the infinite
    model classes more than the largest shift away from both ends all behave like one generic
    class, so a quotient of length twice that shift plus two shows every case.
    """
    star = translate_to_star(f)
    shift = max((t.power for a in iter_atoms(star) for t in (a.left, a.right)), default=0)
    length = 2 * shift + 2 if fin is None else fin
    quotient = build_model(f"interval:{length}")
    holds = {cls: evaluate(quotient, star, {var: cls}) for cls in quotient.domain}
    generic = shift + 1 if fin is None else None
    named = [cls for cls in quotient.domain if cls != generic]
    misses = [cls for cls in named if not holds[cls]]
    hits = [cls for cls in named if holds[cls]]
    if holds.get(generic, len(misses) <= len(hits)):
        return conj(*(neg(_class_literal(var, cls, length)) for cls in misses))
    return disj(*(_class_literal(var, cls, length) for cls in hits))


def simplify_pair(f: Formula, fin: int | None = None) -> Formula:
    """
    Fold atoms with :func:`pair_atom`; a formula in one variable is then written by its classes.

    Equations in that variable that hold on ``C_fin`` are settled first. If none is left the
    result is a conjunction of excluded classes or a disjunction of allowed ones, read in the
    model whose last class has index ``fin``, or in the infinite model when ``fin`` is ``None``.
    """
    folded = map_atoms(f, pair_atom)
    names = free_vars(folded)
    if len(names) != 1 or not is_quantifier_free(folded):
        return folded
    try:
        settled = disj(*(_settle_on_fin(lc) for lc in literal_split(folded)))
    except DnfCapExceeded:
        return folded
    if any(isinstance(a, EqAtom) for a in iter_atoms(settled)):
        return folded
    return _by_classes(settled, names[0], fin)


def _f_power(term: Term, power: int) -> Term:
    return term.under("f" * power)


# ─────────────────────────────────────────────
# Coordinates
# ─────────────────────────────────────────────


def coordinate_solve_by_level(
    model: PairModel, constraints: Sequence[tuple[FGString, Element]]
) -> dict[int, list[Element]]:
    """
    Solve ``s_1(x) = b_1, ..., s_r(x) = b_r`` coordinate by coordinate.

    Solutions are grouped by how many classes they lie below the common class of the ``b``'s.
    Below ``C_fin`` that distance is the word length; on ``C_fin`` it ranges over ``0..length``
    and a solution at distance ``j`` is determined by the images of the ``j`` innermost letters.

    Args:
        model: A pair model.
        constraints: ``(word, element)`` pairs; all words have the same length.

    Returns:
        Solutions per distance, each list in domain order. Empty when the ``b``'s lie in
        different classes.

    Raises:
        ValueError: If there is no constraint or the word lengths differ.
    """
    if not constraints:
        raise ValueError("At least one constraint is required")
    lengths = {len(word) for word, _ in constraints}
    if len(lengths) != 1:
        raise ValueError(f"Words of different lengths: {sorted(lengths)}")
    (length,) = lengths
    classes = {model.class_of(b) for _, b in constraints}
    if len(classes) != 1:
        return {}
    (cls,) = classes
    if cls == model.fin:
        levels = range(min(length, model.fin) + 1)
    else:
        levels = [length] if cls >= length else []

    out: dict[int, list[Element]] = {}
    for level in levels:
        size = len(constraints[0][1][1])
        fixed: dict[int, tuple] = {}
        consistent = True
        for word, b in constraints:
            index = _block_index(suffix(word, level))
            if fixed.setdefault(index, b[1]) != b[1]:
                consistent = False
                break
        if not consistent:
            out[level] = []
            continue
        choices = [
            [fixed[i]] if i in fixed else list(itertools.product(range(model.m), repeat=size))
            for i in range(2**level)
        ]
        solutions = [
            (cls - level, tuple(itertools.chain.from_iterable(blocks)))
            for blocks in itertools.product(*choices)
        ]
        out[level] = sorted(solutions, key=model.index_of)
    return out


def coordinate_solve(
    model: PairModel, constraints: Sequence[tuple[FGString, Element]]
) -> list[Element]:
    """Every ``x`` with ``s(x) = b`` for each constraint, in domain order."""
    by_level = coordinate_solve_by_level(model, constraints)
    solutions = itertools.chain.from_iterable(by_level.values())
    return sorted(solutions, key=model.index_of)


# ─────────────────────────────────────────────
# Intermediate form
# ─────────────────────────────────────────────


@dataclass(frozen=True)
class IntermediateForm:
    """
    A conjunction of word equations on ``x`` at a single length ``k``, plus a class-level residue.

    Attributes:
        var: The variable ``x``.
        k: Length of every word.
        basic: ``(s, t(y))`` for each ``s(x) = t(y)``.
        self_pairs: ``(s, t)`` for each ``s(x) = t(x)``; their closure is the relation ``~``.
        residue: Equivalence formula (no ``=``) conjoined to the equations.
    """

    var: str
    k: int
    basic: tuple[tuple[FGString, Term], ...] = ()
    self_pairs: tuple[tuple[FGString, FGString], ...] = ()
    residue: Formula = TRUE

    def __post_init__(self) -> None:
        lengths = {len(s) for s, _ in self.basic} | {
            len(w) for pair in self.self_pairs for w in pair
        }
        if lengths - {self.k}:
            raise ValueError(f"Words of length {sorted(lengths - {self.k})} in a {self.k}-form")
        if any(isinstance(a, EqAtom) for a in iter_atoms(self.residue)):
            raise ValueError("The residue of an intermediate form must be equality free")

    def classes(self) -> dict[FGString, FGString]:
        """Representative of each word's ``~``-class."""
        return _merge_classes(words(self.k), self.self_pairs)

    def to_formula(self) -> Formula:
        """The conjunction this form stands for."""
        x = self.var
        return conj(
            *(EqAtom(Term(x, s), target) for s, target in self.basic),
            *(EqAtom(Term(x, s), Term(x, t)) for s, t in self.self_pairs),
            self.residue,
        )


def max_word_length(atoms: Iterable[Atom]) -> int:
    """Longest FG word in the terms of ``atoms``."""
    depths = [0]
    for atom in atoms:
        if isinstance(atom, ClassAtom):
            depths.append(atom.term.depth)
        elif isinstance(atom, (EAtom, EqAtom)):
            depths.extend((atom.left.depth, atom.right.depth))
    return max(depths)


def _oriented(atom: EqAtom | EAtom, x: str) -> tuple[Term, Term]:
    """Both sides of a binary atom with an ``x`` term first."""
    if atom.left.var == x:
        return atom.left, atom.right
    return atom.right, atom.left


def rewrite_intermediate(lc: LiteralConjunction, k: int | None = None) -> IntermediateForm:
    """
    Rewrite a conjunction of atoms on ``x`` as a ``k``-intermediate form.

    ``s(x) = t(y)`` becomes ``s(x) E t(y)`` and ``us(x) = ut(y)`` for every word ``u`` of length
    ``k - |s|``; ``s(x) = t(x)`` of equal lengths becomes ``us(x) = ut(x)``; with ``|s| > |t|``
    it becomes ``f^(k-|s|)s(x) = f^(k-|t|)t(x)`` and ``C_fin(t(x))``. Other atoms go to the
    residue unchanged.

    Args:
        lc: Atoms only, each mentioning ``lc.var``.
        k: Word length; defaults to one more than the longest word of ``lc``.

    Raises:
        ValueError: If ``lc`` has negative literals, no variable, or ``k`` is too small.
    """
    x = lc.var
    if x is None:
        raise ValueError("A distinguished variable is required")
    if lc.negatives:
        raise ValueError("Intermediate forms are built from atoms only")
    longest = max_word_length(lc.positives)
    k = longest + 1 if k is None else k
    if k <= longest:
        raise ValueError(f"k = {k} does not exceed the longest word ({longest})")

    basic: dict[tuple[FGString, Term], None] = {}
    self_pairs: dict[tuple[FGString, FGString], None] = {}
    residue: list[Formula] = []
    for atom in lc.positives:
        if not isinstance(atom, EqAtom):
            residue.append(atom)
            continue
        s, t = _oriented(atom, x)
        if t.var != x:
            residue.append(pair_atom(EAtom(s, t)))
            for u in words(k - s.depth):
                basic.setdefault((u + s.word, t.under(u)), None)
            continue
        if s.depth < t.depth:
            s, t = t, s
        if s.depth == t.depth:
            pairs = [(u + s.word, u + t.word) for u in words(k - s.depth)]
        else:
            pairs = [("f" * (k - s.depth) + s.word, "f" * (k - t.depth) + t.word)]
            residue.append(ClassAtom(ClassKind.FIN, 0, t))
        for a, b in pairs:
            if a != b:
                self_pairs.setdefault((a, b), None)
    logger.debug(f"Intermediate form of {x} at k={k}: {len(basic)} basic, {len(self_pairs)} self")
    return IntermediateForm(x, k, tuple(basic), tuple(self_pairs), conj(*residue))


# ─────────────────────────────────────────────
# Equivalence formulas
# ─────────────────────────────────────────────


def eliminate_equiv_exists(
    f: Formula, var: str, cap: int = DEFAULT_DNF_CAP, fin: int | None = None
) -> Formula:
    """
    Quantifier-free equivalent of ``exists var f`` for an equality-free formula.

    The formula is read on the class quotient, eliminated there and translated back. Closed
    conditions on the quotient are decided in the model whose last class has index ``fin``, or
    in the infinite model when ``fin`` is ``None``.

    Raises:
        EquivalenceFormulaError: If ``f`` contains an equality atom.
    """
    quotient = translate_to_star(f)
    eliminated = qe_star(Exists(var, quotient), cap)
    return simplify_pair(pull_back(eliminated, fin), fin)


# ─────────────────────────────────────────────
# Polynomial cardinality
# ─────────────────────────────────────────────


@dataclass(frozen=True)
class PolyCardDef:
    """
    Size of ``{x : phi(x, y)}`` as a polynomial in ``X = |[anchor]_E|``.

    Attributes:
        var: The counted variable.
        anchor: A term in one parameter whose class size is ``X``.
        cases: Pairwise exclusive guards with their nonzero polynomials; the set is empty
            outside every guard.
    """

    var: str
    anchor: Term
    cases: tuple[CardCase, ...] = ()

    def value_in(self, model: PairModel, params: Assignment) -> int:
        """Size predicted for ``params`` in ``model``; 0 when no guard holds."""
        for case in self.cases:
            if evaluate(model, case.guard, params):
                element = model.term_value(self.anchor, params)
                size = pair_class_size(model.n, model.m, model.class_of(element))
                return eval_card_expr(case.value, {PAIR_ANCHOR: size})
        return 0

    def to_dict(self) -> dict:
        """JSON-ready description; coefficients are listed from the leading one down."""
        return {
            "var": self.var,
            "anchor": term_to_sexpr(self.anchor),
            "cases": [
                {
                    "guard": to_sexpr(case.guard),
                    "poly": format_card_expr(case.value),
                    "coefficients": [
                        int(c) for c in sp.Poly(case.value, PAIR_ANCHOR).all_coeffs()
                    ],
                }
                for case in self.cases
            ],
            "cauchy_bound": cauchy_bound(self),
        }


def _group_conditions(groups: dict[str, list[Term]]) -> list[tuple[Formula, bool]]:
    out = []
    for targets in groups.values():
        first, *rest = dict.fromkeys(targets)
        out.extend((pair_atom(EqAtom(first, other)), True) for other in rest)
    return out


def _level_blocks(form: IntermediateForm, level: int) -> tuple[list[tuple[Formula, bool]], int]:
    """
    Coordinates of ``x`` when its ``k``-images are read through their ``level`` innermost letters.

    Returns:
        The equations the targets must satisfy and the number of unconstrained blocks.
    """
    owners = form.classes()
    blocks = _merge_classes(
        {suffix(w, level) for w in owners},
        ((suffix(w, level), suffix(owner, level)) for w, owner in owners.items()),
    )
    groups: dict[str, list[Term]] = {}
    for word, target in form.basic:
        groups.setdefault(blocks[suffix(word, level)], []).append(target)
    free = len(set(blocks.values())) - len(groups)
    return _group_conditions(groups), free


class _UnevenAnchor(ValueError):
    """A count is not a whole power of the anchor class size."""


def _anchor_power(free: int, lift: int) -> int:
    """
    Exponent of ``X`` for ``free`` blocks when each block is ``lift`` classes above the anchor.

    A class has the square of the size of the class above it below ``C_fin``.
    """
    exponent, rest = divmod(free, 2**lift)
    if rest:
        raise _UnevenAnchor(f"{free} blocks are not a power of a class {lift} step(s) down")
    return exponent


def _form_terms(
    form: IntermediateForm,
    anchor: Term,
    lift: int = 0,
    cap: int = DEFAULT_DNF_CAP,
    fin: int | None = None,
) -> list[CountTerm]:
    """
    Signed count terms for one intermediate form, with guards on the parameters.

    ``f^lift`` of the anchor lies in the class of ``f^k(x)``.

    Raises:
        _UnevenAnchor: If a count is not a polynomial in the size of the anchor class.
    """
    x, k = form.var, form.k
    base = _f_power(anchor, lift)
    w = fresh_name("w", set(free_vars(form.to_formula())) | {anchor.var})
    residue = rename_free(form.residue, {x: w})
    on_fin = ClassAtom(ClassKind.FIN, 0, base)

    terms = []
    generic_guard = eliminate_equiv_exists(
        conj(EAtom(Term(w, "f" * k), base), residue), w, cap, fin
    )
    conditions, free = _level_blocks(form, k)
    terms.append(
        CountTerm.of(
            PAIR_ANCHOR ** _anchor_power(free, lift),
            (on_fin, False),
            (generic_guard, True),
            *conditions,
        )
    )
    for level in range(k + 1):
        level_guard = eliminate_equiv_exists(
            conj(ClassAtom(ClassKind.FIN, level, Term(w)), residue), w, cap, fin
        )
        conditions, free = _level_blocks(form, level)
        # the anchor sits level - k + lift classes below C_fin, or on it
        power = _anchor_power(free, max(0, level - k + lift))
        terms.append(
            CountTerm.of(PAIR_ANCHOR**power, (on_fin, True), (level_guard, True), *conditions)
        )
    return [t for t in terms if t is not None]


def _definition(var: str, anchor: Term, terms: list[CountTerm]) -> PolyCardDef:
    cases = exclusive_cases(terms)
    logger.debug(f"Cardinality of {var} in |[{anchor}]|: {len(cases)} case(s)")
    return PolyCardDef(var, anchor, tuple(cases))


def _basic_anchor(form: IntermediateForm) -> Term:
    if not form.basic:
        raise ValueError("A basic part is required to fix the anchor class")
    return form.basic[0][1]


def polycard_basic(
    form: IntermediateForm,
    anchor: Term | None = None,
    lift: int = 0,
    cap: int = DEFAULT_DNF_CAP,
    fin: int | None = None,
) -> PolyCardDef:
    """
    Definable polynomial cardinality of a ``k``-intermediate form.

    Off ``C_fin`` every solution lies in the class ``k`` steps below ``f^lift`` of the anchor
    and each unconstrained ``~``-class of words contributes a factor ``X^(1/2^lift)``. On
    ``C_fin`` solutions sit at each distance ``l <= k`` below it, where only the ``l`` innermost
    letters of a word matter.

    Args:
        form: The intermediate form; its residue becomes part of the guards.
        anchor: Term with ``f^lift`` of it in the class of ``f^k(x)``; defaults to the first
            basic target with ``lift`` 0.
        lift: Classes between the anchor and the class of ``f^k(x)``.
        cap: DNF literal budget for the class-level eliminations.
        fin: Index of C_fin when the guards are meant for one finite model.

    Raises:
        ValueError: If some count is not a whole power of the anchor class size.
    """
    if anchor is None:
        anchor, lift = _basic_anchor(form), 0
    return _definition(form.var, anchor, _form_terms(form, anchor, lift, cap, fin))


def _link(lc: LiteralConjunction) -> tuple[Term, Term] | None:
    """``(s(x), t(y))`` of the first positive equation or E-atom linking to a parameter."""
    candidates = sorted(
        (a for a in lc.positives if isinstance(a, (EqAtom, EAtom))),
        key=lambda a: not isinstance(a, EqAtom),
    )
    for atom in candidates:
        s, t = _oriented(atom, lc.var)
        if t.var != lc.var:
            return s, t
    return None


def polycard_literals(
    lc: LiteralConjunction, cap: int = DEFAULT_DNF_CAP, fin: int | None = None
) -> PolyCardDef:
    """
    Definable polynomial cardinality of a conjunction of literals with a link to a parameter.

    The positive part is rewritten at one ``k`` for every subset of the negated atoms; the
    negations are then removed by inclusion-exclusion and the signed terms are sorted into
    exclusive cases. The anchor is the link target ``t(y)``. When longer words split the
    coordinates of ``x`` more finely than ``t(y)`` does, it moves to ``f(t(y))``, ``ff(t(y))``
    and so on until every count is a polynomial.

    Args:
        lc: Pair-signature literals, each mentioning ``lc.var``, with a positive
            ``s(x) = t(y)`` or ``s(x) E t(y)``.
        cap: DNF literal budget for the class-level eliminations.
        fin: Index of C_fin when the guards are meant for one finite model.

    Raises:
        ValueError: If no positive literal links ``x`` to a parameter.
    """
    link = _link(lc)
    if link is None:
        raise ValueError(f"No positive literal links {lc.var} to a parameter")
    s, t = link
    k = max_word_length(lc.positives + lc.negatives) + 1
    depth = k - s.depth

    def definition(lift: int) -> PolyCardDef:
        anchor = _f_power(t, depth - lift)

        def count_with(extra: tuple) -> list[CountTerm]:
            positive = LiteralConjunction(lc.positives + extra, (), lc.var)
            return _form_terms(rewrite_intermediate(positive, k), anchor, lift, cap, fin)

        return _definition(lc.var, anchor, signed_subset_terms(lc.negatives, count_with))

    for lift in range(depth, 0, -1):
        try:
            return definition(lift)
        except _UnevenAnchor as e:
            logger.debug(f"Anchor {depth - lift} step(s) above {t} rejected: {e}")
    return definition(0)


# ─────────────────────────────────────────────
# From cardinality to existence
# ─────────────────────────────────────────────


def cauchy_bound(p: PolyCardDef) -> int:
    """
    An integer ``B`` such that no case polynomial vanishes at any ``X >= B``.

    Every root of ``a_d X^d + ... + a_0`` is smaller than ``1 + max |a_i / a_d|``.
    """
    bound = 0
    for case in p.cases:
        leading, *lower = sp.Poly(case.value, PAIR_ANCHOR).all_coeffs()
        ratio = max((abs(Fraction(int(a), int(leading))) for a in lower), default=Fraction(0))
        bound = max(bound, math.ceil(1 + ratio))
    return bound


@dataclass(frozen=True)
class BoundedFormula:
    """A formula that holds on finite models with at least ``cauchy_bound`` anchor elements."""

    formula: Formula
    cauchy_bound: int


def exists_from_polycard(p: PolyCardDef) -> BoundedFormula:
    """
    ``exists x`` from a cardinality definition: the disjunction of its guards.

    Raises:
        ZeroPolynomialError: If a case polynomial is zero.
    """
    if any(card(case.value) == 0 for case in p.cases):
        raise ZeroPolynomialError(f"Cardinality definition of {p.var} has a zero case")
    bound = cauchy_bound(p)
    logger.debug(f"Existence of {p.var} from {len(p.cases)} case(s), Cauchy bound {bound}")
    return BoundedFormula(disj(*(case.guard for case in p.cases)), bound)


# ─────────────────────────────────────────────
# Class traces
# ─────────────────────────────────────────────


@dataclass(frozen=True)
class ClassTrace:
    """``theta(var)``: the classes that meet a definable set, in the unary class predicates."""

    var: str
    theta: Formula


def _lower(atom: Atom) -> Formula:
    """A single-variable class-level atom as unary class predicates of the variable itself."""
    if isinstance(atom, EAtom):
        atom = pair_atom(atom)
        if not isinstance(atom, ClassAtom):
            return atom
    if not isinstance(atom, ClassAtom) or not atom.term.word:
        return atom
    var, depth = atom.term.var, atom.term.depth
    if atom.kind is ClassKind.INIT:
        if atom.index < depth:
            return FALSE
        return ClassAtom(ClassKind.INIT, atom.index - depth, Term(var))
    if atom.index:
        return ClassAtom(ClassKind.FIN, atom.index + depth, Term(var))
    return disj(*(ClassAtom(ClassKind.FIN, i, Term(var)) for i in range(depth + 1)))


def _self_equation(atom: EqAtom, x: str, k: int) -> Formula:
    form = rewrite_intermediate(LiteralConjunction((atom,), (), x), k)
    return form.to_formula()


def _regime_unary(literals: list[tuple[ClassAtom, bool]], level: int | None, k: int) -> Formula:
    """
    The unary literals restricted to one regime.

    ``level`` is the distance below ``C_fin``; ``None`` is every class at distance ``k`` or more.
    """
    parts = []
    for atom, polarity in literals:
        if atom.kind is ClassKind.FIN:
            if level is not None:
                if (atom.index == level) != polarity:
                    return FALSE
                continue
            if atom.index < k:
                if polarity:
                    return FALSE
                continue
        parts.append(atom if polarity else neg(atom))
    return conj(*parts)


def _regime_open(
    self_pairs: list[tuple[FGString, FGString]],
    apart: list[tuple[FGString, FGString]],
    level: int,
    k: int,
) -> bool:
    """Whether some element at the given distance meets the word equations and disequations."""
    blocks = _merge_classes(
        {suffix(w, level) for w in words(k)},
        ((suffix(a, level), suffix(b, level)) for a, b in self_pairs),
    )
    return all(blocks[suffix(a, level)] != blocks[suffix(b, level)] for a, b in apart)


def class_trace(
    f: Formula, var: str | None = None, out: str = "w", cap: int = DEFAULT_DNF_CAP
) -> ClassTrace:
    """
    Classes meeting a single-variable definable set.

    Word equations are put at one length ``k``; below distance ``k`` from ``C_fin`` the
    coordinates are free, so a clause is met exactly when no disequation joins two
    ``~``-equivalent words. Closer to ``C_fin`` only the innermost letters count.

    Args:
        f: Quantifier-free pair formula with at most one free variable.
        var: That variable; inferred when omitted.
        out: Name of the variable of ``theta``.
        cap: DNF literal budget.

    Returns:
        The trace, in the predicates ``C_{init+i}`` and ``C_{fin-i}`` of ``out``.

    Raises:
        ValueError: If ``f`` has more than one free variable.
    """
    names = free_vars(f)
    if len(names) > 1 or (var is not None and names and names != (var,)):
        raise ValueError(f"Class traces need a single-variable formula, got {names}")
    x = var or (names[0] if names else out)
    k = max_word_length(iter_atoms(f)) + 1

    def expand(atom: Atom) -> Formula:
        if isinstance(atom, EqAtom):
            return map_atoms(_self_equation(atom, x, k), _lower)
        return _lower(atom)

    thetas = []
    for lc in literal_split(map_atoms(f, expand), cap):
        self_pairs = [(a.left.word, a.right.word) for a in lc.positives if isinstance(a, EqAtom)]
        apart = [(a.left.word, a.right.word) for a in lc.negatives if isinstance(a, EqAtom)]
        unary = [(a, p) for a, p in lc.literals() if isinstance(a, ClassAtom)]
        regimes = [None, *range(k)]
        open_ = [_regime_open(self_pairs, apart, k if r is None else r, k) for r in regimes]
        if all(open_):
            thetas.append(conj(*(a if p else neg(a) for a, p in unary)))
            continue
        for regime, is_open in zip(regimes, open_):
            if not is_open:
                continue
            if regime is None:
                place = conj(*(neg(ClassAtom(ClassKind.FIN, i, Term(x))) for i in range(k)))
            else:
                place = ClassAtom(ClassKind.FIN, regime, Term(x))
            thetas.append(conj(place, _regime_unary(unary, regime, k)))
    theta = rename_free(disj(*thetas), {x: out}) if x != out else disj(*thetas)
    return ClassTrace(out, theta)


# ─────────────────────────────────────────────
# Existential elimination
# ─────────────────────────────────────────────


class Route(Enum):
    """How an existential was eliminated."""

    POLYCARD = "polycard"
    CLASS_TRACE = "class_trace"


@dataclass(frozen=True)
class PairElimination:
    """
    Result of eliminating one existential, with what the finite check needs.

    Attributes:
        formula: The quantifier-free equivalent.
        route: Which argument produced it.
        anchor: Anchor term of the cardinality definition (polycard route only).
        cauchy_bound: Minimal anchor class size for the formula to hold on finite models.
        discarded: Negative equations to parameters dropped on the class-trace route; classes
            need more elements than this.
    """

    formula: Formula
    route: Route
    anchor: Term | None = None
    cauchy_bound: int = 0
    discarded: int = 0


def eliminate_exists_pair_detailed(
    lc: LiteralConjunction, cap: int = DEFAULT_DNF_CAP, fin: int | None = None
) -> PairElimination:
    """
    Quantifier-free equivalent of ``exists x`` over pair literals that all mention ``x``.

    With a positive link to a parameter the guards of the cardinality definition are the answer.
    Otherwise the single-variable literals are traced to classes, the class-level literals are
    eliminated with them, and negative equations to parameters are dropped since a class with a
    solution has room to avoid them. With ``fin`` the class-level conditions are decided in the
    finite model whose last class has that index.
    """
    x = lc.var
    if _link(lc) is not None:
        p = polycard_literals(lc, cap, fin)
        result = exists_from_polycard(p)
        return PairElimination(
            result.formula, Route.POLYCARD, p.anchor, result.cauchy_bound, 0
        )

    single, linked, discarded = [], [], 0
    for atom, polarity in lc.literals():
        if set(atom_vars(atom)) == {x}:
            single.append(atom if polarity else neg(atom))
        elif isinstance(atom, EqAtom):
            discarded += 1
        else:
            linked.append(atom if polarity else neg(atom))
    w = fresh_name("w", set(free_vars(lc.to_formula())))
    trace = class_trace(conj(*single), x, w, cap)
    formula = eliminate_equiv_exists(
        conj(trace.theta, rename_free(conj(*linked), {x: w})), w, cap, fin
    )
    logger.debug(f"Class-trace elimination of {x}, {discarded} disequation(s) dropped")
    return PairElimination(formula, Route.CLASS_TRACE, discarded=discarded)


def eliminate_exists_pair(
    lc: LiteralConjunction, cap: int = DEFAULT_DNF_CAP, fin: int | None = None
) -> Formula:
    """The formula of :func:`eliminate_exists_pair_detailed`."""
    return eliminate_exists_pair_detailed(lc, cap, fin).formula
