# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Seeded random corpora and their brute-force cross-validation.

Each suite draws formulas that stay inside the range where its eliminator is exact on the
finite models it is checked on:

- ``tree``: literal conjunctions on ``string:4`` and ``string:5`` with strings of length at
  most 2, at most two negative literals, and excluded subsorts ending in ``0`` or ``1`` so some
  subsort survives. Parameter tuples are sampled.
- ``pair`` and ``polycard``: literal conjunctions on ``pair:3,3`` and ``pair:4,2`` (``polycard``
  also on ``pair:3,2``) with words of length at most 2, eliminated against the class count of
  each check model.
- ``star``: one or two nested quantifiers over successor atoms, checked on every interval up to
  the largest check length.
"""

import itertools
import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

from pseudofinite_workbench.formula import (
    CFIN,
    CINIT,
    BAtom,
    ClassAtom,
    ClassKind,
    EAtom,
    EqAtom,
    Exists,
    Forall,
    Formula,
    StarTerm,
    Term,
    UAtom,
    conj,
    disj,
    free_vars,
    neg,
)
from pseudofinite_workbench.logger import setup_logger
from pseudofinite_workbench.models import (
    DEFAULT_BUDGET,
    Assignment,
    FiniteStructure,
    PairModel,
    build_model,
    count,
    evaluate,
    pair_class_size,
)
from pseudofinite_workbench.normal_forms import DEFAULT_DNF_CAP, LiteralConjunction
from pseudofinite_workbench.qe_pair import (
    PolyCardDef,
    Route,
    eliminate_exists_pair_detailed,
    polycard_literals,
)
from pseudofinite_workbench.qe_str import eliminate_exists_str
from pseudofinite_workbench.sexpr import to_sexpr
from pseudofinite_workbench.star import qe_star

logger = setup_logger(__name__)

DEFAULT_SIZE = 200
DEFAULT_MAX_ASSIGNMENTS = 2000


class Suite(Enum):
    """The random soundness suites."""

    TREE = "tree"
    PAIR = "pair"
    STAR = "star"
    POLYCARD = "polycard"


DEFAULT_CHECK_MODELS: dict[Suite, tuple[str, ...]] = {
    Suite.TREE: ("string:4", "string:5"),
    Suite.PAIR: ("pair:3,3", "pair:4,2"),
    Suite.STAR: tuple(f"interval:{length}" for length in range(1, 13)),
    Suite.POLYCARD: ("pair:3,2", "pair:3,3", "pair:4,2"),
}
# string:5 has 3125 elements, so tree tuples are always a sample
SUITE_MAX_ASSIGNMENTS: dict[Suite, int] = {Suite.TREE: 100}


@dataclass(frozen=True)
class CorpusCheck:
    """
    Cross-validation of one corpus formula on one model.

    Attributes:
        suite: The suite the formula belongs to.
        index: Position of the formula in the corpus.
        model: The family member checked.
        formula: Input, printed as an s-expression.
        result: Eliminator output or cardinality summary.
        checked: Parameter tuples compared.
        skipped: Parameter tuples outside the adequacy range.
        failures: Tuples on which the two sides disagreed.
        witness: First disagreeing tuple, in element notation.
    """

    suite: Suite
    index: int
    model: str
    formula: str
    result: str
    checked: int
    skipped: int = 0
    failures: int = 0
    witness: str = ""

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def csv_row(self) -> dict:
        return {
            "suite": self.suite.value,
            "index": self.index,
            "model": self.model,
            "formula": self.formula,
            "result": self.result,
            "checked": self.checked,
            "skipped": self.skipped,
            "failures": self.failures,
            "witness": self.witness,
        }


# ─────────────────────────────────────────────
# Generators
# ─────────────────────────────────────────────


def _digits(rng: random.Random, length: int, letters: int = 3) -> tuple[int, ...]:
    return tuple(rng.randrange(letters) for _ in range(length))


def _tree_atom(rng: random.Random, params: Sequence[str], negative: bool):
    shape = rng.choice(("U", "B", "B", "="))
    if shape == "U":
        if negative:
            return UAtom(_digits(rng, rng.randint(0, 1)) + (rng.randrange(2),), "x")
        return UAtom(_digits(rng, rng.randint(0, 2)), "x")
    p = rng.choice(params)
    if shape == "=":
        return EqAtom(Term("x"), Term(p))
    length = rng.randint(0, 2)
    sigma, tau = _digits(rng, length), _digits(rng, length)
    return BAtom(sigma, tau, "x", p) if rng.random() < 0.5 else BAtom(tau, sigma, p, "x")


def _literal_conjunction(rng: random.Random, draw, first=None) -> LiteralConjunction:
    positives, negatives = [first] if first is not None else [], []
    for _ in range(rng.randint(1, 3)):
        negative = len(negatives) < 2 and rng.random() < 0.4
        (negatives if negative else positives).append(draw(negative))
    return LiteralConjunction(
        tuple(dict.fromkeys(positives)), tuple(dict.fromkeys(negatives)), "x"
    )


def random_tree_conjunction(
    rng: random.Random, params: Sequence[str] = ("y", "z")
) -> LiteralConjunction:
    """Random tree literals in ``x`` and ``params``."""
    return _literal_conjunction(rng, lambda negative: _tree_atom(rng, params, negative))


def _pair_term(rng: random.Random, var: str, max_word: int) -> Term:
    return Term(var, "".join(rng.choice("fg") for _ in range(rng.randint(0, max_word))))


def _pair_atom(rng: random.Random, params: Sequence[str], max_word: int):
    x = _pair_term(rng, "x", max_word)
    other = rng.choice((*params, *params, "x"))
    shape = rng.choice(("=", "E", "C"))
    if shape == "C":
        kind = rng.choice((ClassKind.INIT, ClassKind.FIN))
        return ClassAtom(kind, rng.randint(0, 1), x)
    right = _pair_term(rng, other, max_word)
    return EqAtom(x, right) if shape == "=" else EAtom(x, right)


def random_pair_conjunction(
    rng: random.Random, params: Sequence[str] = ("y",), max_word: int = 2, linked: bool = False
) -> LiteralConjunction:
    """
    Random pair literals in ``x`` and ``params`` with words of length at most ``max_word``.

    With ``linked`` the first literal is a positive equation or E-atom to a parameter.
    """
    first = None
    if linked:
        kind = EqAtom if rng.random() < 0.5 else EAtom
        first = kind(
            _pair_term(rng, "x", max_word), _pair_term(rng, rng.choice(params), max_word)
        )

    def draw(negative: bool):
        while True:
            atom = _pair_atom(rng, params, max_word)
            if isinstance(atom, ClassAtom) or atom.left != atom.right:
                return atom

    return _literal_conjunction(rng, draw, first)


def _star_atom(rng: random.Random, scope: Sequence[str], bound: str, max_power: int) -> EqAtom:
    bases = (*scope, CINIT, CFIN)
    left = StarTerm(bound, rng.randint(0, max_power))
    right = StarTerm(rng.choice(bases), rng.randint(0, max_power))
    return EqAtom(left, right) if rng.random() < 0.5 else EqAtom(right, left)


def _star_body(rng: random.Random, scope: Sequence[str], bound: str, max_power: int) -> Formula:
    literals = []
    for _ in range(rng.randint(1, 3)):
        atom = _star_atom(rng, scope, bound, max_power)
        literals.append(neg(atom) if rng.random() < 0.4 else atom)
    if len(literals) > 2 and rng.random() < 0.5:
        return disj(conj(*literals[:2]), literals[2])
    return conj(*literals)


def random_star_formula(rng: random.Random, free: str = "y", max_power: int = 2) -> Formula:
    """One or two nested quantifiers over successor atoms with ``free`` as the parameter."""

    def quantify(var: str, body: Formula) -> Formula:
        return Exists(var, body) if rng.random() < 0.7 else Forall(var, body)

    if rng.random() < 0.6:
        return quantify("x", _star_body(rng, ("x", free), "x", max_power))
    inner = quantify("z", _star_body(rng, ("x", "z", free), "z", max_power))
    return quantify("x", conj(inner, _star_body(rng, ("x", free), "x", max_power)))


# ─────────────────────────────────────────────
# Checks
# ─────────────────────────────────────────────


def parameter_tuples(
    model: FiniteStructure,
    names: Sequence[str],
    rng: random.Random,
    max_assignments: int = DEFAULT_MAX_ASSIGNMENTS,
) -> Iterator[Assignment]:
    """Every assignment of ``names``, or a seeded sample when there are too many."""
    if len(model) ** len(names) <= max_assignments:
        for values in itertools.product(model.domain, repeat=len(names)):
            yield dict(zip(names, values))
        return
    for _ in range(max_assignments):
        yield {name: rng.choice(model.domain) for name in names}


def _format_env(model: FiniteStructure, env: Assignment) -> str:
    return " ".join(f"{k}={model.format_element(v)}" for k, v in sorted(env.items()))


def _compare(
    suite: Suite,
    index: int,
    model: FiniteStructure,
    source: Formula,
    result_text: str,
    left,
    right,
    envs: Iterator[Assignment],
    adequate=lambda env: True,
) -> CorpusCheck:
    checked = skipped = failures = 0
    witness = ""
    for env in envs:
        if not adequate(env):
            skipped += 1
            continue
        checked += 1
        if left(env) != right(env):
            failures += 1
            witness = witness or _format_env(model, env)
    return CorpusCheck(
        suite,
        index,
        str(model.spec),
        to_sexpr(source),
        result_text,
        checked,
        skipped,
        failures,
        witness,
    )


def _params_of(f: Formula) -> tuple[str, ...]:
    return tuple(v for v in free_vars(f) if v != "x")


def _check_tree(index, lc, models, rng, max_assignments, cap) -> list[CorpusCheck]:
    source = Exists("x", lc.to_formula())
    result = eliminate_exists_str(lc)
    names = _params_of(lc.to_formula())
    return [
        _compare(
            Suite.TREE,
            index,
            model,
            source,
            to_sexpr(result),
            lambda env, model=model: evaluate(model, source, env),
            lambda env, model=model: evaluate(model, result, env),
            parameter_tuples(model, names, rng, max_assignments),
        )
        for model in models
    ]


def _anchor_size(model: PairModel, anchor: Term, env: Assignment) -> int:
    cls = model.class_of(model.term_value(anchor, env))
    return pair_class_size(model.n, model.m, cls)


def _check_pair(index, lc, models, rng, max_assignments, cap) -> list[CorpusCheck]:
    source = Exists("x", lc.to_formula())
    names = _params_of(lc.to_formula())
    out = []
    for model in models:
        elimination = eliminate_exists_pair_detailed(lc, cap, model.fin)
        result = elimination.formula
        if elimination.route is Route.POLYCARD:

            def adequate(env, model=model, elimination=elimination):
                size = _anchor_size(model, elimination.anchor, env)
                return size >= elimination.cauchy_bound

        else:

            def adequate(env, model=model, elimination=elimination):
                return pair_class_size(model.n, model.m, model.fin) > elimination.discarded

        out.append(
            _compare(
                Suite.PAIR,
                index,
                model,
                source,
                to_sexpr(result),
                lambda env, model=model: evaluate(model, source, env),
                lambda env, model=model, result=result: evaluate(model, result, env),
                parameter_tuples(model, names, rng, max_assignments),
                adequate,
            )
        )
    return out


def _summary(p: PolyCardDef) -> str:
    return "; ".join(f"{c['poly']} if {c['guard']}" for c in p.to_dict()["cases"]) or "0"


def _check_polycard(index, lc, models, rng, max_assignments, cap) -> list[CorpusCheck]:
    body = lc.to_formula()
    names = _params_of(body)
    out = []
    for model in models:
        p = polycard_literals(lc, cap, model.fin)
        out.append(
            _compare(
                Suite.POLYCARD,
                index,
                model,
                body,
                _summary(p),
                lambda env, model=model: count(model, body, env),
                lambda env, model=model, p=p: p.value_in(model, env),
                parameter_tuples(model, names, rng, max_assignments),
            )
        )
    return out


def _check_star(index, f, models, rng, max_assignments, cap) -> list[CorpusCheck]:
    result = qe_star(f, cap)
    names = tuple(free_vars(f))
    return [
        _compare(
            Suite.STAR,
            index,
            model,
            f,
            to_sexpr(result),
            lambda env, model=model: evaluate(model, f, env),
            lambda env, model=model: evaluate(model, result, env),
            parameter_tuples(model, names, rng, max_assignments),
        )
        for model in models
    ]


_GENERATORS = {
    Suite.TREE: (random_tree_conjunction, _check_tree),
    Suite.PAIR: (random_pair_conjunction, _check_pair),
    Suite.STAR: (random_star_formula, _check_star),
    Suite.POLYCARD: (lambda rng: random_pair_conjunction(rng, linked=True), _check_polycard),
}


def generate(suite: Suite, seed: int, size: int = DEFAULT_SIZE) -> list:
    """The ``size`` inputs of ``suite`` for ``seed``; the same seed gives the same corpus."""
    rng = random.Random(f"{suite.value}:{seed}")
    draw, _ = _GENERATORS[suite]
    return [draw(rng) for _ in range(size)]


def run_suite(
    suite: Suite,
    seed: int,
    size: int = DEFAULT_SIZE,
    check_models: Sequence[str] | None = None,
    max_assignments: int | None = None,
    cap: int = DEFAULT_DNF_CAP,
    budget: int = DEFAULT_BUDGET,
) -> list[CorpusCheck]:
    """
    Generate a corpus and compare every item with brute force on each check model.

    Args:
        suite: Which suite to run.
        seed: Corpus seed.
        size: Number of inputs.
        check_models: Family members to check on; :data:`DEFAULT_CHECK_MODELS` by default.
        max_assignments: Parameter tuples per model above which a seeded sample is used;
            :data:`SUITE_MAX_ASSIGNMENTS` or :data:`DEFAULT_MAX_ASSIGNMENTS` by default.
        cap: DNF literal budget.
        budget: Largest model that may be built.

    Returns:
        One check per input and model, ordered by input then model.
    """
    models = [build_model(spec, budget) for spec in (check_models or DEFAULT_CHECK_MODELS[suite])]
    if max_assignments is None:
        max_assignments = SUITE_MAX_ASSIGNMENTS.get(suite, DEFAULT_MAX_ASSIGNMENTS)
    _, check = _GENERATORS[suite]
    rng = random.Random(f"{suite.value}:{seed}:params")
    out: list[CorpusCheck] = []
    for index, item in enumerate(generate(suite, seed, size)):
        out.extend(check(index, item, models, rng, max_assignments, cap))
    failed = sum(1 for c in out if not c.passed)
    logger.info(f"{suite.value} corpus of {size} at seed {seed}: {failed} failing check(s)")
    return out
