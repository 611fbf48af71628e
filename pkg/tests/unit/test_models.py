# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

import pytest

from pseudofinite_workbench.formula import (
    Signature,
    SignatureError,
)
from pseudofinite_workbench.models import (
    FamilyKind,
    FamilySpec,
    ModelBudgetError,
    UnassignedVariableError,
    audit_pair_axioms,
    audit_tree_axioms,
    build_model,
    count,
    d_sum,
    definable_set,
    eqclass_tail,
    equivalent_on,
    evaluate,
    pair_class_size,
    pair_model_size,
    string_sort_size,
)
from pseudofinite_workbench.sexpr import parse_formula


@pytest.mark.parametrize(
    "spec, size",
    [
        ("pair:3,2", 22),
        ("pair:3,3", 93),
        ("pair:4,2", 278),
        ("string:3", 27),
        ("eqclass:3", 39),
        ("interval:6", 7),
    ],
)
def test_model_sizes(spec, size):
    """Enumerated domains match the closed forms."""
    model = build_model(spec)
    assert len(model) == size
    assert FamilySpec.parse(spec).size() == size


def test_pair_model_size_formula():
    assert pair_model_size(4, 2) == 2 + 4 + 16 + 256


@pytest.mark.parametrize(
    "text, message",
    [
        ("pair", "expected <family>:<params>"),
        ("ring:3", "Unknown model family"),
        ("pair:3", "take 2 parameter"),
        ("string:1", "at least 2"),
        ("string:a", "Invalid parameters"),
    ],
)
def test_invalid_family_specs(text, message):
    with pytest.raises(ValueError, match=message):
        FamilySpec.parse(text)


def test_spec_round_trips_through_text():
    spec = FamilySpec.parse(" Pair:4,3 ")
    assert spec == FamilySpec(FamilyKind.PAIR, (4, 3))
    assert str(spec) == "pair:4,3"
    assert spec.signature is Signature.PAIR


def test_budget_is_enforced():
    with pytest.raises(ModelBudgetError) as e:
        build_model("string:5", budget=1000)
    assert (e.value.size, e.value.budget) == (3125, 1000)


def test_pair_apply_reads_rightmost_letter_first():
    """f keeps the first half of the labels, g the second; cfin is fixed."""
    model = build_model("pair:3,2")
    a = (0, (0, 1, 1, 0))
    assert model.apply("g", a) == (1, (1, 0))
    assert model.apply("fg", a) == (2, (1,))
    assert model.apply("ffg", a) == (2, (1,))
    assert model.class_of(model.apply("f", a)) == 1


def test_pair_named_classes():
    """C_{init+k} is class min(k, n-1); C_{fin-k} is empty past the first class."""
    model = build_model("pair:4,2")
    f = parse_formula("(and (not (Cinit 0 x)) (not (Cinit 1 x)))", Signature.PAIR)
    assert count(model, f) == 6
    assert count(model, parse_formula("(Cinit 7 x)", Signature.PAIR)) == 2
    assert count(model, parse_formula("(Cfin 4 x)", Signature.PAIR)) == 0
    assert count(model, parse_formula("(Cfin 1 x)", Signature.PAIR)) == 4


def test_string_sorts_and_bijections():
    model = build_model("string:3")
    assert count(model, parse_formula('(U "0" x)', Signature.TREE)) == string_sort_size(3, 1)
    b = parse_formula('(B "0" "2" x y)', Signature.TREE)
    assert evaluate(model, b, {"x": (0, 1, 2), "y": (2, 1, 2)})
    assert not evaluate(model, b, {"x": (0, 1, 2), "y": (2, 2, 2)})
    assert count(model, b, {"y": (2, 1, 2)}) == 1


def test_eqclass_representatives():
    """Excluding the largest class of eqclass:3 leaves 3 + 9 elements."""
    model = build_model("eqclass:3")
    f = parse_formula("(not (E x c))", Signature.EQ)
    c = model.class_representative(1)
    assert count(model, f, {"c": c}) == eqclass_tail(3, 1) == 12


def test_interval_successor_stops_at_the_end():
    model = build_model("interval:4")
    f = parse_formula("(= (S 1 x) cfin)", Signature.STAR)
    assert definable_set(model, f) == [(3,), (4,)]


def test_quantifiers_range_over_the_domain():
    model = build_model("interval:3")
    f = parse_formula("(forall y (exists x (= (S 1 x) y)))", Signature.STAR)
    assert not evaluate(model, f)
    g = parse_formula("(exists x (= (S 1 x) y))", Signature.STAR)
    assert definable_set(model, g, target=("y",)) == [(1,), (2,), (3,)]


def test_unassigned_variable():
    model = build_model("interval:3")
    with pytest.raises(UnassignedVariableError, match="y"):
        evaluate(model, parse_formula("(= x y)", Signature.STAR), {"x": 0})


def test_signature_mismatch():
    model = build_model("interval:3")
    with pytest.raises(SignatureError):
        evaluate(model, parse_formula('(U "0" x)', Signature.TREE), {"x": 0})


def test_equivalent_on_reports_witness():
    model = build_model("interval:3")
    left = parse_formula("(= x cfin)", Signature.STAR)
    right = parse_formula("(= (S 1 x) cfin)", Signature.STAR)
    assert equivalent_on(model, left, left) is None
    assert equivalent_on(model, left, right) == {"x": 2}


@pytest.mark.parametrize(
    "n, m, cls, size", [(4, 2, 0, 256), (4, 2, 3, 2), (3, 3, 1, 9)]
)
def test_pair_class_size(n, m, cls, size):
    assert pair_class_size(n, m, cls) == size


def test_partial_sums():
    assert d_sum(1, 2) == 6
    assert eqclass_tail(4, 0) == 4 + 16 + 64 + 256
    assert string_sort_size(3, 4) == 0


@pytest.mark.parametrize("spec", ["pair:3,2", "pair:3,3", "pair:4,2"])
def test_pair_audit_passes(spec):
    assert audit_pair_axioms(build_model(spec)) == []


def test_tree_audit_passes():
    assert audit_tree_axioms(build_model("string:2")) == []
    assert audit_tree_axioms(build_model("string:3"), samples=40, seed=7) == []
