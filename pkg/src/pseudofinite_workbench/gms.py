# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Descending dimension chains on the three structure families.

Each chain is a sequence of uniformly defined sets, level ``j + 1`` inside level ``j``, whose
sizes drop by an unbounded factor along the family:

- ``sa_tree``: the sorts ``U_{0^j}`` of the string models.
- ``a_pair``: ``x`` outside the first ``j + 1`` classes of a pair model, each excluded class
  named by a parameter in it.
- ``a_eqclass``: ``x`` outside the ``j`` largest classes of an equivalence-class model.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

from pseudofinite_workbench.counting import (
    DeltaMode,
    DeltaResult,
    DeltaVerdict,
    EmptySweepError,
    FamilyCard,
    Point,
    delta_compare,
    eqclass_tail_card,
    pair_family_card,
    string_anchor,
    string_family_card,
)
from pseudofinite_workbench.formula import (
    TRUE,
    DigitString,
    EAtom,
    Formula,
    Term,
    UAtom,
    WorkbenchError,
    conj,
    format_digits,
    neg,
)
from pseudofinite_workbench.logger import setup_logger
from pseudofinite_workbench.models import (
    DEFAULT_BUDGET,
    Assignment,
    FamilyKind,
    FamilySpec,
    FiniteStructure,
    build_model,
    definable_set,
)

logger = setup_logger(__name__)


class ChainDepthError(WorkbenchError):
    """Raised when a chain is deeper than the smallest model of its sweep supports."""


class ChainKind(Enum):
    """The three shipped chains."""

    SA_TREE = "sa_tree"
    A_PAIR = "a_pair"
    A_EQCLASS = "a_eqclass"


_FAMILY = {
    ChainKind.SA_TREE: FamilyKind.STRING,
    ChainKind.A_PAIR: FamilyKind.PAIR,
    ChainKind.A_EQCLASS: FamilyKind.EQCLASS,
}

DEFAULT_SWEEPS: dict[ChainKind, list[Point]] = {
    ChainKind.SA_TREE: [(3,), (4,), (5,)],
    ChainKind.A_PAIR: [(4, 2), (4, 3), (4, 4)],
    ChainKind.A_EQCLASS: [(4,), (5,), (6,)],
}


def _max_depth(kind: ChainKind, point: Point) -> int:
    n = point[0]
    return n - 2 if kind is ChainKind.A_PAIR else n - 1


@dataclass(frozen=True)
class ChainLevel:
    """
    One level of a chain.

    Attributes:
        index: Level number, from 0.
        formula: The defining formula in ``x`` and the parameters.
        params: Parameter names, in the order their witnesses are chosen.
        card: Exact size along the family.
    """

    index: int
    formula: Formula
    params: tuple[str, ...]
    card: FamilyCard


@dataclass(frozen=True)
class Chain:
    """A descending chain of definable sets and the sweep it is checked on."""

    kind: ChainKind
    depth: int
    sweep: tuple[Point, ...]
    levels: tuple[ChainLevel, ...]
    branch: DigitString = ()

    @property
    def family(self) -> FamilyKind:
        return _FAMILY[self.kind]

    def spec(self, point: Point) -> FamilySpec:
        """The family member at a sweep point."""
        return FamilySpec(self.family, tuple(point))

    def parameters(self, model: FiniteStructure, level: ChainLevel) -> Assignment:
        """
        Witnesses for the parameters of ``level``: the least element of each excluded class.

        ``a_i`` lies in the ``i``-th class from the initial one; ``c_i`` in the ``i``-th
        largest class.
        """
        if self.kind is ChainKind.A_PAIR:
            return {name: _least_in_class(model, i) for i, name in enumerate(level.params)}
        if self.kind is ChainKind.A_EQCLASS:
            return {
                name: model.class_representative(i)
                for i, name in enumerate(level.params, start=1)
            }
        return {}


def _least_in_class(model: FiniteStructure, cls: int):
    return next(e for e in model.domain if model.class_of(e) == cls)


def _tree_levels(depth: int, branch: DigitString) -> list[ChainLevel]:
    levels = []
    for j in range(depth + 1):
        sigma = branch[:j]
        card = string_family_card(string_anchor(sigma), f"|U_{format_digits(sigma)}|")
        levels.append(ChainLevel(j, UAtom(sigma, "x"), (), card))
    return levels


def _pair_levels(depth: int) -> list[ChainLevel]:
    levels = []
    for j in range(depth + 1):
        params = tuple(f"a{i}" for i in range(j + 1))
        formula = conj(*(neg(EAtom(Term("x"), Term(a))) for a in params))

        def terms(n: int, j: int = j) -> dict[int, int]:
            return {2**i: 1 for i in range(n - j - 1)}

        card = pair_family_card(f"D_(n-{j}-2),m", terms)
        levels.append(ChainLevel(j, formula, params, card))
    return levels


def _eqclass_levels(depth: int) -> list[ChainLevel]:
    levels = []
    for j in range(depth + 1):
        params = tuple(f"c{i}" for i in range(1, j + 1))
        formula = conj(*(neg(EAtom(Term("x"), Term(c))) for c in params)) if params else TRUE
        levels.append(ChainLevel(j, formula, params, eqclass_tail_card(j)))
    return levels


def build_chain(
    kind: ChainKind,
    depth: int,
    sweep: Sequence[Point] | None = None,
    branch: DigitString | None = None,
) -> Chain:
    """
    Instantiate a chain with levels ``0..depth``.

    Args:
        kind: Which chain.
        depth: Index of the last level.
        sweep: Family parameters to check it on; defaults to :data:`DEFAULT_SWEEPS`.
        branch: For ``sa_tree``, the branch whose prefixes name the sorts; all zeros by default.

    Raises:
        ValueError: If ``depth`` is not positive or ``branch`` is too short.
        EmptySweepError: If ``sweep`` is empty.
        ChainDepthError: If a sweep point is too small for ``depth``.
    """
    if depth < 1:
        raise ValueError(f"Chain depth must be positive, got {depth}")
    points = tuple(tuple(p) for p in (DEFAULT_SWEEPS[kind] if sweep is None else sweep))
    if not points:
        raise EmptySweepError("A chain needs at least one sweep point")
    smallest = min(points)
    if depth > _max_depth(kind, smallest):
        raise ChainDepthError(
            f"{kind.value} chain of depth {depth} needs larger models than {smallest}"
        )

    if kind is ChainKind.SA_TREE:
        branch = tuple(branch) if branch is not None else (0,) * depth
        if len(branch) < depth:
            raise ValueError(f"Branch {format_digits(branch)!r} is shorter than depth {depth}")
        if any(letter >= p[0] for letter in branch[:depth] for p in points):
            raise ChainDepthError(f"Branch {format_digits(branch)!r} leaves the sweep alphabet")
        levels = _tree_levels(depth, branch)
    elif kind is ChainKind.A_PAIR:
        branch = ()
        levels = _pair_levels(depth)
    else:
        branch = ()
        levels = _eqclass_levels(depth)
    logger.debug(f"Built {kind.value} chain of depth {depth} over {len(points)} point(s)")
    return Chain(kind, depth, points, tuple(levels), tuple(branch[:depth]))


# ─────────────────────────────────────────────
# Verification
# ─────────────────────────────────────────────


@dataclass(frozen=True)
class ChainRow:
    """Measured size of one level at one sweep point."""

    level: int
    point: Point
    count: int
    expected: int
    ratio_to_previous: Fraction | None


@dataclass(frozen=True)
class AdjacentVerdict:
    """Comparison of level ``level`` with level ``level - 1``."""

    level: int
    symbolic: DeltaResult
    empirical: DeltaResult

    @property
    def descending(self) -> bool:
        return (
            self.symbolic.verdict is DeltaVerdict.FIRST_SMALLER
            and self.empirical.verdict is DeltaVerdict.FIRST_SMALLER
        )


@dataclass
class ChainReport:
    """
    Outcome of :func:`verify_chain`.

    Attributes:
        chain: The verified chain.
        rows: One row per level and sweep point.
        verdicts: One comparison per adjacent pair of levels.
        counterexamples: Human-readable descriptions of every failed check.
    """

    chain: Chain
    rows: list[ChainRow] = field(default_factory=list)
    verdicts: list[AdjacentVerdict] = field(default_factory=list)
    counterexamples: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples and all(v.descending for v in self.verdicts)

    def csv_rows(self) -> list[dict]:
        """Rows for the chain CSV report, sorted by level then sweep point."""
        by_level = {v.level: v for v in self.verdicts}
        out = []
        for row in sorted(self.rows, key=lambda r: (r.level, r.point)):
            verdict = by_level.get(row.level)
            ratio = row.ratio_to_previous
            out.append(
                {
                    "kind": self.chain.kind.value,
                    "level": row.level,
                    "params": ":".join(str(p) for p in row.point),
                    "count": row.count,
                    "ratio_to_previous": "" if ratio is None else str(ratio),
                    "symbolic": verdict.symbolic.verdict.value if verdict else "",
                    "empirical": verdict.empirical.verdict.value if verdict else "",
                }
            )
        return out


def _measured_card(level: ChainLevel, counts: dict[Point, int]) -> FamilyCard:
    return FamilyCard(level.card.family, level.card.label, counts.__getitem__, level.card.grade)


def verify_chain(chain: Chain, nmax: int = 8, budget: int = DEFAULT_BUDGET) -> ChainReport:
    """
    Count every level on every sweep point and compare adjacent levels.

    The chain passes when the brute-force counts match the closed forms, each level is a
    strict subset of the previous one, and every adjacent pair is FIRST_SMALLER both
    symbolically and on the measured counts.

    Raises:
        ModelBudgetError: If a sweep point exceeds ``budget``.
    """
    report = ChainReport(chain)
    counts: dict[int, dict[Point, int]] = {level.index: {} for level in chain.levels}
    for point in chain.sweep:
        model = build_model(chain.spec(point), budget)
        previous: set | None = None
        for level in chain.levels:
            params = chain.parameters(model, level)
            members = set(definable_set(model, level.formula, params))
            count = len(members)
            expected = level.card.evaluator(point)
            counts[level.index][point] = count
            prev_count = counts[level.index - 1][point] if level.index else None
            ratio = Fraction(count, prev_count) if prev_count else None
            report.rows.append(ChainRow(level.index, point, count, expected, ratio))
            if count != expected:
                report.counterexamples.append(
                    f"level {level.index} at {point}: counted {count}, expected {expected}"
                )
            if previous is not None and not members < previous:
                report.counterexamples.append(
                    f"level {level.index} at {point} is not a strict subset of level "
                    f"{level.index - 1}"
                )
            previous = members
        logger.info(f"Counted {len(chain.levels)} levels of {chain.kind.value} at {point}")

    for prev, level in zip(chain.levels, chain.levels[1:]):
        symbolic = delta_compare(level.card, prev.card, DeltaMode.SYMBOLIC, chain.sweep)
        empirical = delta_compare(
            _measured_card(level, counts[level.index]),
            _measured_card(prev, counts[prev.index]),
            DeltaMode.EMPIRICAL,
            chain.sweep,
            nmax,
        )
        report.verdicts.append(AdjacentVerdict(level.index, symbolic, empirical))
    verdict = "PASS" if report.passed else "FAIL"
    logger.info(f"{chain.kind.value} chain of depth {chain.depth}: {verdict}")
    return report
