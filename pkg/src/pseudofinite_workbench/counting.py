# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Exact cardinality algebra, dimension comparison and cardinality definitions.

Cardinalities are sympy polynomials over named anchors: ``|U_0|`` is the size of a sort of a
string model, ``|M|`` the whole domain and ``X`` the size of an anchor class of a pair model.
"""

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

import sympy as sp

from pseudofinite_workbench.formula import (
    FALSE,
    TRUE,
    BAtom,
    DigitString,
    EqAtom,
    Formula,
    Not,
    Signature,
    WorkbenchError,
    atom_vars,
    check_signature,
    conj,
    disj,
    format_digits,
    formula_size,
    free_vars,
    is_quantifier_free,
    neg,
    parse_digits,
)
from pseudofinite_workbench.logger import setup_logger
from pseudofinite_workbench.models import (
    Assignment,
    FamilyKind,
    StringModel,
    eqclass_tail,
    evaluate,
    string_sort_size,
)
from pseudofinite_workbench.normal_forms import (
    DEFAULT_DNF_CAP,
    DnfCapExceeded,
    LiteralConjunction,
    literal_split,
)
from pseudofinite_workbench.qe_str import eliminate_exists_str

logger = setup_logger(__name__)

CardExpr = sp.Expr
Point = tuple[int, ...]


class UnboundAnchorError(WorkbenchError):
    """Raised when a cardinality expression mentions an anchor with no value."""


class MixedFamilyError(WorkbenchError):
    """Raised when cardinalities of different families are compared."""


class EmptySweepError(WorkbenchError):
    """Raised when an empirical comparison gets no sweep points."""


class MissingSubsetError(WorkbenchError):
    """Raised when inclusion-exclusion lacks an intersection cardinality."""


class LayeringError(WorkbenchError):
    """Raised when nested cardinality definitions do not fit together."""


# ─────────────────────────────────────────────
# Anchors and expressions
# ─────────────────────────────────────────────

WHOLE_DOMAIN = "|M|"
PAIR_ANCHOR = sp.Symbol("X", integer=True, nonnegative=True)


def anchor(name: str) -> sp.Symbol:
    """The anchor symbol called ``name``."""
    return sp.Symbol(name, integer=True, nonnegative=True)


def string_anchor(sigma: DigitString) -> sp.Symbol:
    """``|U_sigma|``; the empty string names the whole domain."""
    return anchor(WHOLE_DOMAIN if not sigma else f"|U_{format_digits(sigma)}|")


def anchor_string(symbol: sp.Symbol) -> DigitString:
    """Inverse of :func:`string_anchor`."""
    if symbol.name == WHOLE_DOMAIN:
        return ()
    if not (symbol.name.startswith("|U_") and symbol.name.endswith("|")):
        raise ValueError(f"{symbol.name} is not a string-model anchor")
    return parse_digits(symbol.name[3:-1])


def card(value: Union[int, CardExpr]) -> CardExpr:
    """Normal form of a cardinality: expanded, like monomials merged."""
    return sp.expand(sp.sympify(value))


def eval_card_expr(e: CardExpr, binding: Mapping[Union[str, sp.Symbol], int]) -> int:
    """
    Evaluate ``e`` exactly.

    Args:
        e: The expression.
        binding: Anchor values, keyed by symbol or by name.

    Raises:
        UnboundAnchorError: If an anchor of ``e`` has no value.
    """
    values = {s.name if isinstance(s, sp.Symbol) else s: v for s, v in binding.items()}
    e = sp.sympify(e)
    unbound = sorted(s.name for s in e.free_symbols if s.name not in values)
    if unbound:
        raise UnboundAnchorError(f"No value for anchor(s): {', '.join(unbound)}")
    result = e.subs({s: values[s.name] for s in e.free_symbols})
    return int(result)


def string_anchor_binding(e: CardExpr, n: int) -> dict[str, int]:
    """Values of the string anchors of ``e`` in ``string:n``; out-of-range sorts are empty."""
    binding = {}
    for symbol in e.free_symbols:
        sigma = anchor_string(symbol)
        valid = all(letter < n for letter in sigma)
        binding[symbol.name] = string_sort_size(n, len(sigma)) if valid else 0
    return binding


def _format_monomial(gens: Sequence[sp.Symbol], exps: Sequence[int]) -> str:
    parts = []
    for gen, exp in zip(gens, exps):
        if exp == 1:
            parts.append(gen.name)
        elif exp:
            parts.append(f"{gen.name}^{exp}")
    return "*".join(parts)


def format_card_expr(e: CardExpr) -> str:
    """Print ``e`` as an expanded polynomial, highest degree first, e.g. ``X^2 - X``."""
    e = card(e)
    gens = sorted(e.free_symbols, key=lambda s: s.name)
    if not gens:
        return str(int(e))
    terms = sp.Poly(e, *gens).terms()
    if not terms:
        return "0"
    out = ""
    for i, (exps, coeff) in enumerate(terms):
        coeff = int(coeff)
        monomial = _format_monomial(gens, exps)
        magnitude = abs(coeff)
        if not monomial:
            body = str(magnitude)
        elif magnitude == 1:
            body = monomial
        else:
            body = f"{magnitude}*{monomial}"
        if i == 0:
            out = f"-{body}" if coeff < 0 else body
        else:
            out += f" - {body}" if coeff < 0 else f" + {body}"
    return out


def fiber_count(fiber_size: Union[int, CardExpr], base_count: Union[int, CardExpr]) -> CardExpr:
    """``|X| = c * |pi(X)|`` when every nonempty fiber has size ``c``."""
    return card(sp.sympify(fiber_size) * sp.sympify(base_count))


def boolean_card(
    intersection_cards: Mapping[Iterable[int], Union[int, CardExpr]],
) -> CardExpr:
    """
    Size of ``A_1 | ... | A_n`` by inclusion-exclusion.

    Args:
        intersection_cards: ``|A_i1 & ... & A_ik|`` keyed by the index set ``{i1..ik}``;
            indices run over ``1..n`` and every nonempty subset must be present.

    Raises:
        MissingSubsetError: If an intersection is missing.
    """
    cards = {frozenset(k): v for k, v in intersection_cards.items()}
    indices = sorted(set().union(*cards)) if cards else []
    total = sp.Integer(0)
    for k in range(1, len(indices) + 1):
        for subset in itertools.combinations(indices, k):
            key = frozenset(subset)
            if key not in cards:
                raise MissingSubsetError(f"No cardinality for intersection {sorted(key)}")
            total += (-1) ** (k + 1) * sp.sympify(cards[key])
    return card(total)


# ─────────────────────────────────────────────
# Signed count terms and exclusive guards
# ─────────────────────────────────────────────

Condition = tuple[Formula, bool]


def _condition(f: Formula, polarity: bool) -> Condition:
    while isinstance(f, Not):
        f, polarity = f.body, not polarity
    return f, polarity


@dataclass(frozen=True)
class CountTerm:
    """``value`` counted when every condition has its polarity, zero otherwise."""

    conditions: tuple[Condition, ...]
    value: CardExpr

    @classmethod
    def of(cls, value: Union[int, CardExpr], *conditions: Condition) -> "CountTerm | None":
        """Normalized term, or ``None`` when a condition is constantly false or the value is 0."""
        kept: dict[Formula, bool] = {}
        for f, polarity in conditions:
            f, polarity = _condition(f, polarity)
            if f in (TRUE, FALSE):
                if (f == TRUE) != polarity:
                    return None
                continue
            if kept.get(f, polarity) != polarity:
                return None
            kept[f] = polarity
        value = card(value)
        if value == 0:
            return None
        return cls(tuple(kept.items()), value)

    def scaled(self, factor: Union[int, CardExpr]) -> "CountTerm":
        return CountTerm(self.conditions, card(self.value * factor))

    def restrict(self, condition: Formula, polarity: bool) -> "CountTerm | None":
        """The term on the branch where ``condition`` has ``polarity``."""
        required = dict(self.conditions)
        if condition in required and required[condition] != polarity:
            return None
        return CountTerm(tuple(c for c in self.conditions if c[0] != condition), self.value)


def signed_subset_terms(
    negatives: Sequence, count_with: Callable[[tuple], list[CountTerm]]
) -> list[CountTerm]:
    """
    Inclusion-exclusion over negated literals.

    ``count_with(S)`` counts the solutions of the positive part together with the literals ``S``
    asserted positively; the result counts the positive part with every literal negated.
    """
    out = []
    for k in range(len(negatives) + 1):
        for subset in itertools.combinations(negatives, k):
            out.extend(t.scaled((-1) ** k) for t in count_with(subset))
    return out


@dataclass(frozen=True)
class CardCase:
    """One value and the guard of the parameter tuples that have it."""

    value: CardExpr
    guard: Formula


def exclusive_cases(terms: Iterable[CountTerm], keep_zero: bool = False) -> list[CardCase]:
    """
    Turn overlapping signed terms into pairwise exclusive guarded values.

    A decision tree splits on one condition at a time; leaves with equal values are merged into
    a single disjunctive guard.

    Args:
        terms: Signed count terms whose sum is the cardinality.
        keep_zero: Keep the case with value 0.

    Returns:
        Cases in order of first discovery.
    """
    leaves: dict[CardExpr, list[Formula]] = {}

    def walk(pending: list[CountTerm], path: tuple[Formula, ...]) -> None:
        guard = conj(*path)
        if guard == FALSE:
            return
        split = next((c for t in pending for c, _ in t.conditions), None)
        if split is None:
            value = card(sum((t.value for t in pending), sp.Integer(0)))
            leaves.setdefault(value, []).append(guard)
            return
        for polarity in (True, False):
            branch = [t.restrict(split, polarity) for t in pending]
            walk([t for t in branch if t is not None], path + (split if polarity else neg(split),))

    walk([t for t in terms if t is not None], ())
    return [
        CardCase(value, disj(*guards))
        for value, guards in leaves.items()
        if keep_zero or value != 0
    ]


# ─────────────────────────────────────────────
# Give and define (tree theory)
# ─────────────────────────────────────────────


@dataclass(frozen=True)
class CardDefinition:
    """
    Guarded cardinalities of ``{target : f}`` as the parameters vary.

    Attributes:
        cases: Pairwise exclusive guards over the parameters with their values.
        target: The counted variables.
        params: The parameters the guards may mention.
    """

    cases: tuple[CardCase, ...]
    target: tuple[str, ...]
    params: tuple[str, ...] = ()

    def anchors(self) -> list[str]:
        """Names of the anchors the values mention."""
        return sorted({s.name for case in self.cases for s in case.value.free_symbols})

    def value_in(self, model: StringModel, params: Assignment | None = None) -> int | None:
        """Evaluated value of the case whose guard holds, ``None`` if no guard holds."""
        env = dict(params or {})
        for case in self.cases:
            if evaluate(model, case.guard, env):
                return eval_card_expr(case.value, string_anchor_binding(case.value, model.n))
        return None


def _is_prefix(short: DigitString, long: DigitString) -> bool:
    return long[: len(short)] == short


def _positive_terms(positives: tuple, var: str) -> list[CountTerm]:
    """Count of a positive conjunction on ``var``: a 0/1 singleton when linked, else a sort."""
    linked = any(len(set(atom_vars(a))) > 1 for a in positives)
    if linked:
        guard = eliminate_exists_str(LiteralConjunction(tuple(positives), (), var))
        term = CountTerm.of(1, (guard, True))
        return [term] if term else []
    base: DigitString = ()
    for atom in positives:
        if isinstance(atom, EqAtom):
            continue
        if isinstance(atom, BAtom):
            if atom.sigma != atom.tau:
                return []
            sigma = atom.sigma
        else:
            sigma = atom.sigma
        if _is_prefix(base, sigma):
            base = sigma
        elif not _is_prefix(sigma, base):
            return []
    return [CountTerm((), string_anchor(base))]


def _conjunction_terms(lc: LiteralConjunction, var: str) -> list[CountTerm]:
    outside = tuple((a, p) for a, p in lc.literals() if var not in atom_vars(a))
    inner, _ = lc.partition(var)

    def count_with(extra: tuple) -> list[CountTerm]:
        terms = _positive_terms(inner.positives + extra, var)
        return [t for t in (CountTerm.of(t.value, *outside, *t.conditions) for t in terms) if t]

    return signed_subset_terms(inner.negatives, count_with)


def _merge_conjunctions(lcs: Sequence[LiteralConjunction]) -> LiteralConjunction | None:
    positives = tuple(dict.fromkeys(a for lc in lcs for a in lc.positives))
    negatives = tuple(dict.fromkeys(a for lc in lcs for a in lc.negatives))
    if set(positives) & set(negatives):
        return None
    return LiteralConjunction(positives, negatives)


def give_and_define(f: Formula, var: str = "x", cap: int = DEFAULT_DNF_CAP) -> CardDefinition:
    """
    Cardinalities of ``{var : f}`` in string models, with the guards that select them.

    The formula is put in DNF; overlapping disjuncts are combined by inclusion-exclusion and
    negative literals by inclusion-exclusion over the positive part. A positive conjunction
    linking ``var`` to a parameter defines at most one element; otherwise it is a sort.

    Args:
        f: Quantifier-free formula in the tree signature.
        var: The counted variable.
        cap: DNF literal budget.

    Returns:
        Exclusive guards covering every parameter tuple, the zero case included.

    Raises:
        SignatureError: If ``f`` is not in the tree signature.
        DnfCapExceeded: If the DNF or the number of disjunct combinations grows past ``cap``.
    """
    check_signature(f, Signature.TREE)
    if not is_quantifier_free(f):
        raise ValueError("give_and_define needs a quantifier-free formula")
    params = tuple(v for v in free_vars(f) if v != var)
    disjuncts = literal_split(f, cap)
    if 2 ** len(disjuncts) > cap:
        raise DnfCapExceeded(cap, formula_size(f))
    terms: list[CountTerm] = []
    for k in range(1, len(disjuncts) + 1):
        for subset in itertools.combinations(disjuncts, k):
            merged = _merge_conjunctions(subset)
            if merged is None:
                continue
            terms.extend(t.scaled((-1) ** (k + 1)) for t in _conjunction_terms(merged, var))
    cases = exclusive_cases(terms, keep_zero=True)
    logger.debug(f"{len(disjuncts)} disjunct(s), {len(terms)} term(s), {len(cases)} case(s)")
    return CardDefinition(tuple(cases), (var,), params)


def lift_tuple_cardinalities(
    outer: CardDefinition, inner: Sequence[CardDefinition]
) -> CardDefinition:
    """
    Combine a one-variable definition with definitions of its own guards.

    ``outer`` gives and defines ``f(w, xs, ys)`` over ``w``; ``inner[i]`` gives and defines the
    guard of ``outer.cases[i]`` over ``xs``. For every choice of one inner case per outer case
    the guard is the conjunction of the chosen inner guards and the value is
    ``sum_i c_i * c_{i, chosen}``; equal values are merged.

    Raises:
        LayeringError: If the inner definitions do not match the outer cases.
    """
    if len(inner) != len(outer.cases):
        raise LayeringError(
            f"{len(outer.cases)} outer case(s) but {len(inner)} inner definition(s)"
        )
    targets = {d.target for d in inner}
    if len(targets) > 1:
        raise LayeringError(f"Inner definitions count different variables: {sorted(targets)}")
    target = inner[0].target if inner else ()
    if set(target) & set(outer.target):
        raise LayeringError("Inner definitions count the outer variable again")
    params = tuple(v for v in outer.params if v not in target)
    merged: dict[CardExpr, list[Formula]] = {}
    for choice in itertools.product(*(d.cases for d in inner)):
        guard = conj(*(c.guard for c in choice))
        if guard == FALSE:
            continue
        value = card(sum((o.value * c.value for o, c in zip(outer.cases, choice)), sp.Integer(0)))
        merged.setdefault(value, []).append(guard)
    cases = tuple(CardCase(value, disj(*guards)) for value, guards in merged.items())
    return CardDefinition(cases, outer.target + target, params)


def define_tuple_cardinality(
    f: Formula, xs: Sequence[str], cap: int = DEFAULT_DNF_CAP
) -> CardDefinition:
    """Give and define the cardinalities of ``{xs : f}`` by induction on ``len(xs)``."""
    if not xs:
        raise ValueError("At least one counted variable is required")
    head, rest = xs[0], tuple(xs[1:])
    outer = give_and_define(f, head, cap)
    if not rest:
        return outer
    inner = [define_tuple_cardinality(case.guard, rest, cap) for case in outer.cases]
    return lift_tuple_cardinalities(outer, inner)


# ─────────────────────────────────────────────
# Family cardinalities and dimension comparison
# ─────────────────────────────────────────────

Grade = tuple[tuple[int, ...], int]


@dataclass(frozen=True)
class FamilyCard:
    """
    A cardinality along a structure family.

    Attributes:
        family: The family the cardinality lives in.
        label: Printable description.
        evaluator: Exact value at a sweep point.
        grade: Leading-term key and coefficient at a sweep point; larger keys grow faster.
            String and equivalence-class grades do not depend on the point, pair grades only
            read ``n``. ``None`` marks the zero cardinality.
    """

    family: FamilyKind
    label: str
    evaluator: Callable[[Point], int] = field(compare=False)
    grade: Callable[[Point], Grade | None] = field(compare=False)


def _leading(groups: dict[tuple[int, ...], int]) -> Grade | None:
    nonzero = {k: c for k, c in groups.items() if c}
    if not nonzero:
        return None
    key = max(nonzero)
    return key, nonzero[key]


def string_family_card(e: Union[int, CardExpr], label: str | None = None) -> FamilyCard:
    """A string-model cardinality; ``|U_sigma|`` is ``n^(n-|sigma|)``."""
    e = card(e)
    gens = sorted(e.free_symbols, key=lambda s: s.name)
    groups: dict[tuple[int, ...], int] = {}
    if gens:
        depths = [len(anchor_string(g)) for g in gens]
        for exps, coeff in sp.Poly(e, *gens).terms():
            key = (sum(exps), -sum(x * d for x, d in zip(exps, depths)))
            groups[key] = groups.get(key, 0) + int(coeff)
    elif e != 0:
        groups[(0, 0)] = int(e)

    def evaluator(point: Point) -> int:
        return eval_card_expr(e, string_anchor_binding(e, point[0]))

    return FamilyCard(
        FamilyKind.STRING, label or format_card_expr(e), evaluator, lambda point: _leading(groups)
    )


def pair_family_card(label: str, terms: Callable[[int], Mapping[int, int]]) -> FamilyCard:
    """A pair-model cardinality ``sum_e c_e * m^e`` whose terms may depend on ``n``."""

    def evaluator(point: Point) -> int:
        n, m = point
        return sum(c * m**e for e, c in terms(n).items())

    def grade(point: Point) -> Grade | None:
        return _leading({(e,): c for e, c in terms(point[0]).items()})

    return FamilyCard(FamilyKind.PAIR, label, evaluator, grade)


def eqclass_tail_card(k: int, label: str | None = None) -> FamilyCard:
    """``sum_{i=1}^{n-k} n^i``, which grows like ``n^(n-k)``."""
    return FamilyCard(
        FamilyKind.EQCLASS,
        label or f"sum_(i=1..n-{k}) n^i",
        lambda point: eqclass_tail(point[0], k),
        lambda point: ((1, -k), 1),
    )


class DeltaVerdict(Enum):
    """Comparison of the growth of two cardinalities."""

    SAME_ORDER = "same_order"
    FIRST_SMALLER = "first_smaller"
    FIRST_LARGER = "first_larger"
    UNKNOWN = "unknown"


class DeltaMode(Enum):
    """Symbolic grades or numeric evidence along a sweep."""

    SYMBOLIC = "symbolic"
    EMPIRICAL = "empirical"


@dataclass(frozen=True)
class DeltaResult:
    """
    Outcome of :func:`delta_compare`.

    Attributes:
        verdict: The verdict.
        mode: How it was obtained.
        qualifier: ``"symbolic"`` or ``"consistent-with"``; empirical verdicts are never proofs.
        evidence: Human-readable support for the verdict.
        counterexample: For UNKNOWN, the sweep point and the two values that broke the pattern.
        multiplier: Largest ``N <= Nmax`` with ``N*a < b`` (or ``N*b < a``) at the last point.
        ratios: ``b/a`` at each sweep point, when defined.
    """

    verdict: DeltaVerdict
    mode: DeltaMode
    qualifier: str
    evidence: str
    counterexample: tuple[Point, int, int] | None = None
    multiplier: int | None = None
    ratios: tuple[Fraction, ...] = ()


DEFAULT_SYMBOLIC_POINTS = {
    FamilyKind.STRING: [(n,) for n in range(3, 9)],
    FamilyKind.PAIR: [(n, n) for n in range(3, 9)],
    FamilyKind.EQCLASS: [(n,) for n in range(3, 9)],
}


def _compare_grades(ga: Grade | None, gb: Grade | None) -> DeltaVerdict:
    if ga is None and gb is None:
        return DeltaVerdict.SAME_ORDER
    if ga is None:
        return DeltaVerdict.FIRST_SMALLER
    if gb is None:
        return DeltaVerdict.FIRST_LARGER
    if ga[0] < gb[0]:
        return DeltaVerdict.FIRST_SMALLER
    if ga[0] > gb[0]:
        return DeltaVerdict.FIRST_LARGER
    return DeltaVerdict.SAME_ORDER


def _growing(ratios: Sequence[Fraction]) -> bool:
    if len(ratios) < 2:
        return False
    steps = [b - a for a, b in zip(ratios, ratios[1:])]
    if any(step <= 0 for step in steps):
        return False
    return all(later * 2 >= earlier for earlier, later in zip(steps, steps[1:]))


def _multiplier(small: int, large: int, nmax: int) -> int:
    return max((n for n in range(1, nmax + 1) if n * small < large), default=0)


def _empirical(a: FamilyCard, b: FamilyCard, sweep: Sequence[Point], nmax: int) -> DeltaResult:
    values = [(point, a.evaluator(point), b.evaluator(point)) for point in sweep]
    _, last_a, last_b = values[-1]

    def result(verdict, evidence, counterexample=None, multiplier=None, ratios=()):
        return DeltaResult(
            verdict,
            DeltaMode.EMPIRICAL,
            "consistent-with",
            evidence,
            counterexample,
            multiplier,
            tuple(ratios),
        )

    if all(va == 0 and vb == 0 for _, va, vb in values):
        return result(DeltaVerdict.SAME_ORDER, "both sets are empty at every sweep point")
    if all(va == 0 < vb for _, va, vb in values):
        return result(DeltaVerdict.FIRST_SMALLER, "first set empty, second nonempty", None, nmax)
    if all(vb == 0 < va for _, va, vb in values):
        return result(DeltaVerdict.FIRST_LARGER, "second set empty, first nonempty", None, nmax)
    bad = next(((p, va, vb) for p, va, vb in values if va <= 0 or vb <= 0), None)
    if bad is not None:
        return result(DeltaVerdict.UNKNOWN, "an empty set at some sweep point", bad)

    ratios = [Fraction(vb, va) for _, va, vb in values]
    if all(va < vb for _, va, vb in values) and _growing(ratios):
        n = _multiplier(last_a, last_b, nmax)
        return result(DeltaVerdict.FIRST_SMALLER, "b/a grows without slowing", None, n, ratios)
    inverse = [1 / r for r in ratios]
    if all(vb < va for _, va, vb in values) and _growing(inverse):
        n = _multiplier(last_b, last_a, nmax)
        return result(DeltaVerdict.FIRST_LARGER, "a/b grows without slowing", None, n, ratios)
    if len(values) == 1 and nmax * last_a < last_b:
        n = _multiplier(last_a, last_b, nmax)
        return result(DeltaVerdict.FIRST_SMALLER, f"b > {nmax}a at one point", None, n, ratios)
    if len(values) == 1 and nmax * last_b < last_a:
        n = _multiplier(last_b, last_a, nmax)
        return result(DeltaVerdict.FIRST_LARGER, f"a > {nmax}b at one point", None, n, ratios)
    outlier = next(
        ((p, va, vb) for (p, va, vb), r in zip(values, ratios) if not 1 / nmax <= r <= nmax),
        None,
    )
    if outlier is None:
        return result(
            DeltaVerdict.SAME_ORDER, f"b/a stays within [1/{nmax}, {nmax}]", None, None, ratios
        )
    return result(
        DeltaVerdict.UNKNOWN,
        "ratio leaves the bounded band without a clear trend",
        outlier,
        None,
        ratios,
    )


def delta_compare(
    a: FamilyCard,
    b: FamilyCard,
    mode: DeltaMode = DeltaMode.SYMBOLIC,
    sweep: Sequence[Point] | None = None,
    nmax: int = 8,
) -> DeltaResult:
    """
    Compare the dimensions of two cardinalities of the same family.

    SYMBOLIC compares leading grades (at every point of ``sweep``, or of a default range, for
    families whose grade depends on the point). EMPIRICAL evaluates both along ``sweep``: the
    first is smaller when it is below the second everywhere and the multiplier ``b/a`` keeps
    growing, of the same order when ``b/a`` stays within ``[1/nmax, nmax]``. A single sweep point
    shows no trend, so there the first is smaller when ``nmax * a < b`` and larger when
    ``nmax * b < a``.

    Raises:
        MixedFamilyError: If the families differ.
        EmptySweepError: If EMPIRICAL mode gets no sweep points.
    """
    if a.family is not b.family:
        raise MixedFamilyError(f"Cannot compare {a.family.value} with {b.family.value}")
    if mode is DeltaMode.EMPIRICAL:
        if not sweep:
            raise EmptySweepError("Empirical comparison needs at least one sweep point")
        return _empirical(a, b, list(sweep), nmax)

    points = list(sweep) if sweep else DEFAULT_SYMBOLIC_POINTS[a.family]
    verdicts = {_compare_grades(a.grade(p), b.grade(p)) for p in points}
    if len(verdicts) == 1:
        verdict = verdicts.pop()
        ga, gb = a.grade(points[-1]), b.grade(points[-1])
        return DeltaResult(verdict, DeltaMode.SYMBOLIC, "symbolic", f"grades {ga} vs {gb}")
    return DeltaResult(
        DeltaVerdict.UNKNOWN, DeltaMode.SYMBOLIC, "symbolic", "grade order changes along the sweep"
    )
