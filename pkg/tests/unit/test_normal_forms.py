# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

import random

import pytest

from pseudofinite_workbench.formula import (
    CFIN,
    CINIT,
    FALSE,
    TRUE,
    And,
    EAtom,
    EqAtom,
    Exists,
    Forall,
    Not,
    Or,
    StarTerm,
    Term,
    UAtom,
    conj,
    disj,
    neg,
)
from pseudofinite_workbench.models import build_model, equivalent_on
from pseudofinite_workbench.normal_forms import (
    DnfCapExceeded,
    LiteralConjunction,
    NormalForm,
    eliminate_innermost,
    literal_split,
    normalize,
    to_nnf,
)

A = UAtom((0,), "x")
B = UAtom((1,), "x")
C = UAtom((2,), "y")


def test_nnf_pushes_negations_to_atoms():
    f = Not(conj(A, disj(B, Not(C))))
    assert to_nnf(f) == disj(Not(A), conj(Not(B), C))


def test_nnf_dualises_quantifiers():
    f = Not(Exists("x", Forall("y", A)))
    assert to_nnf(f) == Forall("x", Exists("y", Not(A)))


def test_literal_split_distributes():
    split = literal_split(conj(disj(A, B), C))
    assert split == [
        LiteralConjunction((A, C), ()),
        LiteralConjunction((B, C), ()),
    ]


def test_literal_split_drops_contradictions_and_folds_reflexive_atoms():
    reflexive = EAtom(Term("x"), Term("x"))
    assert literal_split(conj(A, neg(A))) == []
    assert literal_split(neg(EqAtom(Term("y"), Term("y")))) == []
    assert literal_split(conj(reflexive, neg(B))) == [LiteralConjunction((), (B,))]


def test_literal_split_rejects_quantifiers():
    with pytest.raises(ValueError, match="quantifier-free"):
        literal_split(Exists("x", A))


def test_dnf_cap():
    """Eight binary disjunctions expand to 256 clauses of eight literals."""
    f = conj(*(disj(UAtom((i,), "x"), UAtom((i, 0), "x")) for i in range(8)))
    with pytest.raises(DnfCapExceeded) as e:
        literal_split(f, cap=100)
    assert e.value.cap == 100
    assert len(literal_split(f)) == 256


def test_normalize_modes():
    f = Not(disj(A, B))
    assert normalize(f, NormalForm.NNF) == conj(Not(A), Not(B))
    assert normalize(f, NormalForm.DNF) == conj(Not(A), Not(B))
    assert normalize(conj(A, neg(A)), NormalForm.DNF) == FALSE
    assert normalize(f, NormalForm.LITERAL_SPLIT) == [LiteralConjunction((), (A, B))]


def test_partition_separates_literals_by_variable():
    lc = LiteralConjunction((A, C), (B,))
    inner, rest = lc.partition("x")
    assert inner == LiteralConjunction((A,), (B,), "x")
    assert rest == C


def test_literal_conjunction_checks_distinguished_variable():
    with pytest.raises(ValueError, match="do not mention"):
        LiteralConjunction((C,), (), "x")


def test_eliminate_innermost_calls_eliminator_per_disjunct(mocker):
    """Every disjunct mentioning the bound variable goes through the eliminator once."""
    eliminator = mocker.Mock(return_value=TRUE)
    f = Exists("x", disj(conj(A, C), B, C))
    assert eliminate_innermost(f, eliminator) == TRUE
    seen = [call.args[0] for call in eliminator.call_args_list]
    assert seen == [
        LiteralConjunction((A,), (), "x"),
        LiteralConjunction((B,), (), "x"),
    ]


def test_eliminate_innermost_rewrites_forall():
    """forall x. A is not exists x. not A."""

    def eliminator(lc: LiteralConjunction):
        return FALSE

    assert eliminate_innermost(Forall("x", A), eliminator) == TRUE
    assert eliminate_innermost(Exists("x", A), eliminator) == FALSE


def test_eliminate_innermost_skips_vacuous_quantifier(mocker):
    eliminator = mocker.Mock()
    assert eliminate_innermost(Exists("x", C), eliminator) == C
    eliminator.assert_not_called()


def _random_quantifier_free(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.3:
        left, right = (
            StarTerm(rng.choice(("x", "y", CINIT, CFIN)), rng.randint(0, 2)) for _ in range(2)
        )
        return EqAtom(left, right)
    shape = rng.choice(("not", "and", "or"))
    if shape == "not":
        return Not(_random_quantifier_free(rng, depth - 1))
    parts = tuple(_random_quantifier_free(rng, depth - 1) for _ in range(2))
    return And(parts) if shape == "and" else Or(parts)


def test_normalize_preserves_satisfaction_on_random_formulas():
    """500 seeded formulas agree with every normal form on all assignments of interval:19."""
    model = build_model("interval:19")
    assert len(model) == 20
    rng = random.Random(20240917)
    for _ in range(500):
        f = _random_quantifier_free(rng, 4)
        split = normalize(f, NormalForm.LITERAL_SPLIT)
        for normal in (
            normalize(f, NormalForm.NNF),
            normalize(f, NormalForm.DNF),
            disj(*(lc.to_formula() for lc in split)),
        ):
            assert equivalent_on(model, f, normal) is None, (f, normal)
