# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Finite structure families and the brute-force oracle.

Four families are built here:

- ``string:n``: all strings of length ``n`` over ``{0..n-1}`` with prefix predicates and suffix
  preserving bijections.
- ``pair:n,m``: ``n`` equivalence classes; an element of class ``i`` is a labelling of the leaves
  ``{f,g}^(n-1-i)`` by ``{0..m-1}``, listed with ``f`` before ``g``.
- ``eqclass:n``: ``n`` classes of sizes ``n, n^2, ..., n^n``.
- ``interval:L``: ``{0..L}`` with a successor that stops at ``L``.

Every count in the workbench is checked against :func:`count` on these structures.
"""

import itertools
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterator, Union

from pseudofinite_workbench.formula import (
    CFIN,
    CINIT,
    And,
    Atom,
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
    StarTerm,
    Term,
    UAtom,
    WorkbenchError,
    check_signature,
    free_vars,
)
from pseudofinite_workbench.logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_BUDGET = 10**6

Element = Any
Assignment = dict[str, Element]


class UnassignedVariableError(WorkbenchError):
    """Raised when a free variable of a formula has no value."""


class ModelBudgetError(WorkbenchError):
    """Raised when a structure would have more elements than allowed."""

    def __init__(self, size: int, budget: int):
        super().__init__(f"Model would have {size} elements, budget is {budget}")
        self.size = size
        self.budget = budget


class FamilyKind(Enum):
    """The structure families the workbench can build."""

    STRING = "string"
    PAIR = "pair"
    EQCLASS = "eqclass"
    INTERVAL = "interval"


_ARITY = {FamilyKind.STRING: 1, FamilyKind.PAIR: 2, FamilyKind.EQCLASS: 1, FamilyKind.INTERVAL: 1}

_SIGNATURE = {
    FamilyKind.STRING: Signature.TREE,
    FamilyKind.PAIR: Signature.PAIR,
    FamilyKind.EQCLASS: Signature.EQ,
    FamilyKind.INTERVAL: Signature.STAR,
}


# ─────────────────────────────────────────────
# Exact size formulas
# ─────────────────────────────────────────────


def string_sort_size(n: int, depth: int) -> int:
    """``|U_sigma|`` in ``string:n`` for a valid ``sigma`` of the given length."""
    return n ** (n - depth) if depth <= n else 0


def pair_class_size(n: int, m: int, cls: int) -> int:
    """Size of class ``cls`` of ``pair:n,m``."""
    return m ** (2 ** (n - 1 - cls))


def pair_model_size(n: int, m: int) -> int:
    """``sum_{i<n} m^(2^i)``."""
    return sum(m ** (2**i) for i in range(n))


def d_sum(k: int, m: int) -> int:
    """Total size of the ``k+1`` smallest classes of a pair model, ``sum_{i<=k} m^(2^i)``."""
    return sum(m ** (2**i) for i in range(k + 1))


def eqclass_tail(n: int, k: int) -> int:
    """``sum_{i=1}^{n-k} n^i``: the ``eqclass:n`` domain without its ``k`` largest classes."""
    return sum(n**i for i in range(1, n - k + 1))


# ─────────────────────────────────────────────
# Family specs
# ─────────────────────────────────────────────


@dataclass(frozen=True)
class FamilySpec:
    """
    One member of a structure family.

    Attributes:
        kind: The family.
        params: ``(n,)`` for string and eqclass, ``(n, m)`` for pair, ``(len,)`` for interval.
    """

    kind: FamilyKind
    params: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.params) != _ARITY[self.kind]:
            raise ValueError(
                f"{self.kind.value} models take {_ARITY[self.kind]} parameter(s), "
                f"got {len(self.params)}"
            )
        lowest = 1 if self.kind is FamilyKind.INTERVAL else 2
        if any(p < lowest for p in self.params):
            raise ValueError(
                f"{self.kind.value} parameters must be at least {lowest}, got {self.params}"
            )

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        """Parse ``string:3``, ``pair:3,2``, ``eqclass:4`` or ``interval:6``."""
        name, sep, rest = text.strip().partition(":")
        if not sep:
            raise ValueError(f"Invalid model spec {text!r}, expected <family>:<params>")
        try:
            kind = FamilyKind(name.strip().lower())
        except ValueError as e:
            known = ", ".join(k.value for k in FamilyKind)
            raise ValueError(f"Unknown model family {name!r}, expected one of: {known}") from e
        try:
            params = tuple(int(p) for p in rest.split(","))
        except ValueError as e:
            raise ValueError(f"Invalid parameters in model spec {text!r}") from e
        return cls(kind, params)

    def __str__(self) -> str:
        return f"{self.kind.value}:{','.join(str(p) for p in self.params)}"

    @property
    def signature(self) -> Signature:
        """Signature the family interprets."""
        return _SIGNATURE[self.kind]

    def size(self) -> int:
        """Exact number of elements, without building the structure."""
        if self.kind is FamilyKind.STRING:
            return self.params[0] ** self.params[0]
        if self.kind is FamilyKind.PAIR:
            return pair_model_size(*self.params)
        if self.kind is FamilyKind.EQCLASS:
            return eqclass_tail(self.params[0], 0)
        return self.params[0] + 1


# ─────────────────────────────────────────────
# Structures
# ─────────────────────────────────────────────


class FiniteStructure(ABC):
    """An enumerable domain together with an interpretation of one signature's atoms."""

    def __init__(self, spec: FamilySpec, domain: list[Element]):
        self.spec = spec
        self.domain: tuple[Element, ...] = tuple(domain)
        self._index = {e: i for i, e in enumerate(self.domain)}

    @property
    def signature(self) -> Signature:
        return self.spec.signature

    def __len__(self) -> int:
        return len(self.domain)

    def index_of(self, element: Element) -> int:
        """Position of ``element`` in the domain order."""
        return self._index[element]

    def class_of(self, element: Element) -> int | None:
        """Class index of ``element`` for families with an equivalence relation."""
        return None

    @abstractmethod
    def holds(self, atom: Atom, env: Assignment) -> bool:
        """Truth of ``atom`` under ``env``."""

    @abstractmethod
    def format_element(self, element: Element) -> str:
        """Report notation of an element."""


class StringModel(FiniteStructure):
    """``string:n``; out-of-range strings name empty relations."""

    def __init__(self, spec: FamilySpec):
        self.n = spec.params[0]
        super().__init__(spec, list(itertools.product(range(self.n), repeat=self.n)))

    def holds(self, atom: Atom, env: Assignment) -> bool:
        if isinstance(atom, UAtom):
            sigma = atom.sigma
            return len(sigma) <= self.n and env[atom.var][: len(sigma)] == sigma
        if isinstance(atom, BAtom):
            k = len(atom.sigma)
            if k > self.n:
                return False
            a, b = env[atom.left], env[atom.right]
            return a[:k] == atom.sigma and b[:k] == atom.tau and a[k:] == b[k:]
        if isinstance(atom, EqAtom):
            return env[atom.left.var] == env[atom.right.var]
        raise TypeError(f"Atom {atom!r} is not interpreted in string models")

    def format_element(self, element: Element) -> str:
        return "".join(str(letter) for letter in element)


class PairModel(FiniteStructure):
    """``pair:n,m``; class ``n-1`` is the fixed class of ``f`` and ``g``."""

    def __init__(self, spec: FamilySpec):
        self.n, self.m = spec.params
        domain = [
            (cls, labels)
            for cls in range(self.n)
            for labels in itertools.product(range(self.m), repeat=2 ** (self.n - 1 - cls))
        ]
        super().__init__(spec, domain)

    @property
    def fin(self) -> int:
        return self.n - 1

    def class_of(self, element: Element) -> int:
        return element[0]

    def apply(self, word: str, element: Element) -> Element:
        """Value of ``word(element)``; the rightmost letter is applied first."""
        for letter in reversed(word):
            cls, labels = element
            if cls == self.fin:
                continue
            half = len(labels) // 2
            element = (cls + 1, labels[:half] if letter == "f" else labels[half:])
        return element

    def term_value(self, term: Term, env: Assignment) -> Element:
        return self.apply(term.word, env[term.var])

    def in_named_class(self, kind: ClassKind, index: int, element: Element) -> bool:
        """Membership in ``C_{init+index}`` (class ``min(index, n-1)``) or ``C_{fin-index}``."""
        if kind is ClassKind.INIT:
            return element[0] == min(index, self.fin)
        return element[0] == self.fin - index

    def holds(self, atom: Atom, env: Assignment) -> bool:
        if isinstance(atom, EAtom):
            left, right = self.term_value(atom.left, env), self.term_value(atom.right, env)
            return left[0] == right[0]
        if isinstance(atom, EqAtom):
            return self.term_value(atom.left, env) == self.term_value(atom.right, env)
        if isinstance(atom, ClassAtom):
            return self.in_named_class(atom.kind, atom.index, self.term_value(atom.term, env))
        raise TypeError(f"Atom {atom!r} is not interpreted in pair models")

    def format_element(self, element: Element) -> str:
        cls, labels = element
        return f"c{cls}:" + "".join(str(label) for label in labels)


class EqClassModel(FiniteStructure):
    """``eqclass:n``; element ``(i, j)`` is the ``j``-th member of the class of size ``n^i``."""

    def __init__(self, spec: FamilySpec):
        self.n = spec.params[0]
        domain = [(i, j) for i in range(1, self.n + 1) for j in range(self.n**i)]
        super().__init__(spec, domain)

    def class_of(self, element: Element) -> int:
        return element[0]

    def class_representative(self, rank: int) -> Element:
        """Least element of the ``rank``-th largest class, ``rank`` counted from 1."""
        return (self.n + 1 - rank, 0)

    def holds(self, atom: Atom, env: Assignment) -> bool:
        left, right = env[atom.left.var], env[atom.right.var]
        if isinstance(atom, EAtom):
            return left[0] == right[0]
        if isinstance(atom, EqAtom):
            return left == right
        raise TypeError(f"Atom {atom!r} is not interpreted in equivalence-class models")

    def format_element(self, element: Element) -> str:
        return f"e{element[0]}.{element[1]}"


class IntervalModel(FiniteStructure):
    """``interval:L``: ``{0..L}``, ``S(x) = min(x+1, L)``, ``cinit = 0``, ``cfin = L``."""

    def __init__(self, spec: FamilySpec):
        self.length = spec.params[0]
        super().__init__(spec, list(range(self.length + 1)))

    def term_value(self, term: StarTerm, env: Assignment) -> int:
        if term.base == CINIT:
            start = 0
        elif term.base == CFIN:
            start = self.length
        else:
            start = env[term.base]
        return min(start + term.power, self.length)

    def holds(self, atom: Atom, env: Assignment) -> bool:
        if isinstance(atom, EqAtom):
            return self.term_value(atom.left, env) == self.term_value(atom.right, env)
        raise TypeError(f"Atom {atom!r} is not interpreted in interval models")

    def format_element(self, element: Element) -> str:
        return str(element)


_BUILDERS: dict[FamilyKind, type[FiniteStructure]] = {
    FamilyKind.STRING: StringModel,
    FamilyKind.PAIR: PairModel,
    FamilyKind.EQCLASS: EqClassModel,
    FamilyKind.INTERVAL: IntervalModel,
}


def build_model(spec: Union[FamilySpec, str], budget: int = DEFAULT_BUDGET) -> FiniteStructure:
    """
    Build one structure of a family.

    Args:
        spec: The family member, as a FamilySpec or in its textual form.
        budget: Maximum number of domain elements.

    Returns:
        The structure, with its domain in lexicographic order.

    Raises:
        ValueError: If ``spec`` is invalid.
        ModelBudgetError: If the domain would exceed ``budget``.
    """
    if isinstance(spec, str):
        spec = FamilySpec.parse(spec)
    size = spec.size()
    if size > budget:
        raise ModelBudgetError(size, budget)
    logger.debug(f"Building {spec} with {size} elements")
    return _BUILDERS[spec.kind](spec)


# ─────────────────────────────────────────────
# Satisfaction and counting
# ─────────────────────────────────────────────


def _satisfies(model: FiniteStructure, f: Formula, env: Assignment) -> bool:
    if isinstance(f, And):
        return all(_satisfies(model, a, env) for a in f.args)
    if isinstance(f, Or):
        return any(_satisfies(model, a, env) for a in f.args)
    if isinstance(f, Not):
        return not _satisfies(model, f.body, env)
    if isinstance(f, Exists):
        return any(_satisfies(model, f.body, {**env, f.var: e}) for e in model.domain)
    if isinstance(f, Forall):
        return all(_satisfies(model, f.body, {**env, f.var: e}) for e in model.domain)
    return model.holds(f, env)


def _check_assignment(model: FiniteStructure, f: Formula, names: set[str]) -> None:
    check_signature(f, model.signature)
    missing = [v for v in free_vars(f) if v not in names]
    if missing:
        raise UnassignedVariableError(f"No value for free variable(s): {', '.join(missing)}")


def evaluate(model: FiniteStructure, f: Formula, assignment: Assignment | None = None) -> bool:
    """
    Tarskian satisfaction of ``f`` in ``model``; quantifiers range over the whole domain.

    Raises:
        SignatureError: If ``f`` is not in the model's signature.
        UnassignedVariableError: If a free variable has no value.
    """
    env = dict(assignment or {})
    _check_assignment(model, f, set(env))
    return _satisfies(model, f, env)


def _solutions(
    model: FiniteStructure, f: Formula, params: Assignment | None, target: tuple[str, ...]
) -> Iterator[tuple[Element, ...]]:
    if not target:
        raise ValueError("Counting needs at least one target variable")
    env = dict(params or {})
    _check_assignment(model, f, set(env) | set(target))
    for values in itertools.product(model.domain, repeat=len(target)):
        if _satisfies(model, f, {**env, **dict(zip(target, values))}):
            yield values


def count(
    model: FiniteStructure,
    f: Formula,
    params: Assignment | None = None,
    target: tuple[str, ...] = ("x",),
) -> int:
    """Number of ``target`` tuples satisfying ``f`` with the parameters fixed."""
    return sum(1 for _ in _solutions(model, f, params, target))


def definable_set(
    model: FiniteStructure,
    f: Formula,
    params: Assignment | None = None,
    target: tuple[str, ...] = ("x",),
) -> list[tuple[Element, ...]]:
    """The ``target`` tuples satisfying ``f``, in domain-index order."""
    return list(_solutions(model, f, params, target))


def assignments(model: FiniteStructure, names: tuple[str, ...]) -> Iterator[Assignment]:
    """Every assignment of domain elements to ``names``."""
    for values in itertools.product(model.domain, repeat=len(names)):
        yield dict(zip(names, values))


def equivalent_on(model: FiniteStructure, left: Formula, right: Formula) -> Assignment | None:
    """
    Compare two formulas over every assignment of their joint free variables.

    Returns:
        ``None`` when they agree everywhere, otherwise the first disagreeing assignment.
    """
    names = tuple(dict.fromkeys(free_vars(left) + free_vars(right)))
    for env in assignments(model, names):
        if evaluate(model, left, env) != evaluate(model, right, env):
            return env
    return None


# ─────────────────────────────────────────────
# Axiom audits
# ─────────────────────────────────────────────


@dataclass(frozen=True)
class AxiomViolation:
    """A failing axiom instance and a human-readable witness."""

    axiom: str
    instance: str
    witness: str


def _strings(n: int, max_len: int) -> list[tuple[int, ...]]:
    return [s for k in range(max_len + 1) for s in itertools.product(range(n), repeat=k)]


def _same_length_tuples(
    strings: list[tuple[int, ...]], arity: int, rng: random.Random | None, samples: int | None
) -> Iterator[tuple[tuple[int, ...], ...]]:
    by_len: dict[int, list] = {}
    for s in strings:
        by_len.setdefault(len(s), []).append(s)
    if rng is None:
        for group in by_len.values():
            yield from itertools.product(group, repeat=arity)
        return
    lengths = sorted(by_len)
    for _ in range(samples or 0):
        group = by_len[rng.choice(lengths)]
        yield tuple(rng.choice(group) for _ in range(arity))


def audit_tree_axioms(
    model: StringModel, samples: int | None = None, seed: int = 0
) -> list[AxiomViolation]:
    """
    Check the tree-of-bijections axioms on a string model.

    Instances range over strings on ``{0..n-1}`` of length at most ``n`` (below ``n`` for the
    refinement axiom ``h``). With ``samples`` set, each schema is checked on that many random
    instances instead of all of them.

    Returns:
        Every violation found; empty when the model passes.
    """
    n = model.n
    rng = random.Random(seed) if samples is not None else None
    strings = _strings(n, n)
    sort = {s: [a for a in model.domain if model.holds(UAtom(s, "x"), {"x": a})] for s in strings}
    members = {s: frozenset(elements) for s, elements in sort.items()}
    relations: dict[tuple, BAtom] = {}
    out: list[AxiomViolation] = []

    def fail(axiom: str, instance: str, witness: str) -> None:
        out.append(AxiomViolation(axiom, instance, witness))

    def b(sigma, tau, a, c) -> bool:
        if (sigma, tau) not in relations:
            relations[sigma, tau] = BAtom(sigma, tau, "x", "y")
        atom = relations[sigma, tau]
        return model.holds(atom, {"x": a, "y": c})

    if len(sort[()]) != len(model):
        fail("a", "U_()", "U of the empty string is not the universe")
    for sigma in strings:
        if not sort[sigma]:
            fail("b", f"U_{sigma}", "empty")
        if len(sigma) < n:
            for i in range(n):
                child = sigma + (i,)
                if not members[child] <= members[sigma]:
                    fail("c", f"U_{child} in U_{sigma}", "not a subset")
                for j in range(i + 1, n):
                    if members[child] & members[sigma + (j,)]:
                        fail("d", f"U_{child} and U_{sigma + (j,)}", "not disjoint")

    for sigma, tau in _same_length_tuples(strings, 2, rng, samples):
        graph = {a: [c for c in model.domain if b(sigma, tau, a, c)] for a in model.domain}
        images = [cs[0] for a, cs in graph.items() if a in members[sigma] and len(cs) == 1]
        if any(cs for a, cs in graph.items() if a not in members[sigma]) or len(images) != len(
            sort[sigma]
        ):
            fail("e", f"B_{sigma},{tau}", "not a function on U_sigma")
        elif sorted(images) != sorted(sort[tau]):
            fail("e", f"B_{sigma},{tau}", "not onto U_tau")
        for a, cs in graph.items():
            for c in cs:
                if not b(tau, sigma, c, a):
                    fail("f", f"B_{sigma},{tau}", f"{model.format_element(a)}")
        if len(sigma) < n:
            for i in range(n):
                for a in sort[sigma + (i,)]:
                    for c in sort[tau]:
                        right = c in members[tau + (i,)] and b(sigma + (i,), tau + (i,), a, c)
                        if b(sigma, tau, a, c) != right:
                            fail("h", f"B_{sigma},{tau} at {i}", model.format_element(a))

    for sigma, tau, rho in _same_length_tuples(strings, 3, rng, samples):
        for a in sort[sigma]:
            for c in sort[tau]:
                if not b(sigma, tau, a, c):
                    continue
                for d in sort[rho]:
                    if b(tau, rho, c, d) and not b(sigma, rho, a, d):
                        fail("g", f"B_{sigma},{tau},{rho}", model.format_element(a))
    logger.debug(f"Tree audit of {model.spec}: {len(out)} violation(s)")
    return out


def audit_pair_axioms(model: PairModel) -> list[AxiomViolation]:
    """
    Exhaustively check the pairing axioms on a pair model.

    The non-periodicity schema ``not f^k(x) E x`` is checked for ``1 <= k < n`` on elements
    outside the fixed class, where ``f`` is the identity.

    Returns:
        Every violation found; empty when the model passes.
    """
    out: list[AxiomViolation] = []
    dom = model.domain
    x, y = Term("x"), Term("y")

    def e(a, c) -> bool:
        return model.holds(EAtom(x, y), {"x": a, "y": c})

    def fmt(*elements) -> str:
        return ", ".join(model.format_element(a) for a in elements)

    fx, gx = (lambda a: model.apply("f", a)), (lambda a: model.apply("g", a))
    block = {a: frozenset(c for c in dom if e(a, c)) for a in dom}
    for a in dom:
        if a not in block[a]:
            out.append(AxiomViolation("a", "reflexivity", fmt(a)))
        for c in block[a]:
            if block[c] != block[a]:
                out.append(AxiomViolation("a", "symmetry/transitivity", fmt(a, c)))
            if not e(fx(a), gx(c)):
                out.append(AxiomViolation("b", "x E y -> f(x) E g(y)", fmt(a, c)))

    fixed_f = frozenset(a for a in dom if fx(a) == a)
    fixed_g = frozenset(a for a in dom if gx(a) == a)
    if fixed_f != fixed_g or not fixed_f or fixed_f not in set(block.values()):
        out.append(AxiomViolation("c", "C_fin", "fixed points of f and g differ or are no class"))
    roots_f = frozenset(dom) - {fx(a) for a in dom}
    roots_g = frozenset(dom) - {gx(a) for a in dom}
    if roots_f != roots_g or not roots_f or roots_f not in set(block.values()):
        out.append(AxiomViolation("d", "C_init", "roots of f and g differ or are no class"))

    for a in dom:
        if a in fixed_f:
            continue
        for c in dom:
            if c not in fixed_f and e(fx(a), fx(c)) and not e(a, c):
                out.append(AxiomViolation("e", "f(x) E f(y) -> x E y", fmt(a, c)))

    preimages: dict[tuple, list] = {}
    for z in dom:
        preimages.setdefault((fx(z), gx(z)), []).append(z)
    for cls_block in set(block.values()):
        if cls_block == roots_f:
            continue
        for a in cls_block:
            for c in cls_block:
                zs = [
                    z
                    for z in preimages.get((a, c), [])
                    if cls_block != fixed_f or z not in fixed_f
                ]
                if len(zs) != 1:
                    out.append(AxiomViolation("f", "unique z with f(z), g(z) given", fmt(a, c)))

    for k in range(1, model.n):
        for a in dom:
            if a not in fixed_f and e(model.apply("f" * k, a), a):
                out.append(AxiomViolation("g", f"not f^{k}(x) E x", fmt(a)))
    logger.debug(f"Pair audit of {model.spec}: {len(out)} violation(s)")
    return out
