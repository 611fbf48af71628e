# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

import pytest

from pseudofinite_workbench.formula import TRUE, SignatureError, free_vars, is_quantifier_free
from pseudofinite_workbench.models import build_model, equivalent_on
from pseudofinite_workbench.quantifier_elimination import Theory, eliminate_quantifiers
from pseudofinite_workbench.sexpr import parse_formula


def _assert_eliminated(text, theory, specs, per_model_fin=False):
    source = parse_formula(text, theory.signature)
    for spec in specs:
        model = build_model(spec)
        fin = model.fin if per_model_fin else None
        result = eliminate_quantifiers(source, theory, fin=fin)
        assert is_quantifier_free(result)
        assert set(free_vars(result)) <= set(free_vars(source))
        assert equivalent_on(model, source, result) is None, (spec, result)


@pytest.mark.parametrize(
    "text",
    [
        '(exists x (B "0" "1" x y))',
        '(exists x (and (U "0" x) (not (= x y))))',
        '(forall x (exists y (B "1" "2" x y)))',
        '(exists x (and (B "0" "2" x y) (B "0" "1" x z)))',
    ],
)
def test_tree_theory(text):
    _assert_eliminated(text, Theory.TREE, ["string:3"])


@pytest.mark.parametrize(
    "text",
    [
        '(exists x (= (app "f" x) y))',
        "(exists x (and (E x y) (not (= x y))))",
        "(forall x (or (not (E x y)) (= x y)))",
        '(exists x (and (= (app "g" x) y) (Cfin 0 (app "f" x))))',
        '(exists y (exists x (and (= (app "f" x) y) (Cinit 1 y))))',
        '(forall y (exists x (= (app "f" x) y)))',
    ],
)
def test_pair_theory(text):
    _assert_eliminated(text, Theory.PAIR, ["pair:3,2", "pair:4,2"], per_model_fin=True)


@pytest.mark.parametrize(
    "text",
    [
        "(forall y (exists x (= (S 1 x) y)))",
        "(exists x (and (= (S 1 x) y) (forall z (not (= (S 1 z) x)))))",
        "(exists x (exists z (and (= (S 1 x) z) (= (S 1 z) y) (not (= x z)))))",
    ],
)
def test_star_theory(text):
    _assert_eliminated(text, Theory.STAR, [f"interval:{length}" for length in range(1, 7)])


def test_quantifier_free_input_is_kept_equivalent():
    source = parse_formula("(not (Cinit 0 y))", Theory.PAIR.signature)
    result = eliminate_quantifiers(source, Theory.PAIR)
    assert equivalent_on(build_model("pair:3,2"), source, result) is None


def test_signature_is_checked():
    with pytest.raises(SignatureError):
        eliminate_quantifiers(
            parse_formula('(exists x (U "0" x))', Theory.TREE.signature), Theory.PAIR
        )


def test_pair_eliminator_receives_budget_and_model(mocker):
    eliminate = mocker.patch(
        "pseudofinite_workbench.quantifier_elimination.eliminate_exists_pair",
        return_value=TRUE,
    )
    source = parse_formula('(exists x (= (app "f" x) y))', Theory.PAIR.signature)

    assert eliminate_quantifiers(source, Theory.PAIR, cap=300, fin=3) == TRUE
    eliminate.assert_called_once()
    assert eliminate.call_args.kwargs == {"cap": 300, "fin": 3}


@pytest.mark.parametrize(
    "text",
    [
        '(exists x (= (app "f" x) y))',
        '(exists x (and (= (app "f" x) y) (= (app "g" x) y)))',
    ],
)
@pytest.mark.parametrize("fin", [None, 2, 3])
def test_pair_answers_in_one_variable_are_read_by_classes(text, fin):
    source = parse_formula(text, Theory.PAIR.signature)
    expected = parse_formula("(not (Cinit 0 y))", Theory.PAIR.signature)
    assert eliminate_quantifiers(source, Theory.PAIR, fin=fin) == expected


def test_pair_answers_in_one_variable_name_the_allowed_classes():
    source = parse_formula(
        '(exists x (and (= (app "f" x) y) (Cinit 1 x)))', Theory.PAIR.signature
    )
    expected = parse_formula("(Cinit 2 y)", Theory.PAIR.signature)
    assert eliminate_quantifiers(source, Theory.PAIR) == expected
