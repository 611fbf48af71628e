# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

import pytest

from pseudofinite_workbench.config_models import DEFAULT_SEED
from pseudofinite_workbench.corpus import Suite, generate
from pseudofinite_workbench.formula import (
    CINIT,
    FALSE,
    TRUE,
    BAtom,
    ClassAtom,
    ClassKind,
    EAtom,
    EqAtom,
    Exists,
    Not,
    Signature,
    SignatureError,
    StarTerm,
    Term,
    UAtom,
)
from pseudofinite_workbench.sexpr import (
    FormulaSyntaxError,
    parse_formula,
    term_to_sexpr,
    to_sexpr,
)


def test_parse_tree_atoms():
    f = parse_formula('(and (U "0,1" x) (B "0" "2" x y))', Signature.TREE)
    assert f.args == (UAtom((0, 1), "x"), BAtom((0,), (2,), "x", "y"))


def test_parse_pair_atoms():
    f = parse_formula('(or (= (app "fg" x) y) (E x (app "g" y)) (Cfin 1 x))', Signature.PAIR)
    assert f.args == (
        EqAtom(Term("x", "fg"), Term("y")),
        EAtom(Term("x"), Term("y", "g")),
        ClassAtom(ClassKind.FIN, 1, Term("x")),
    )


def test_parse_star_atoms():
    f = parse_formula("(exists x (= (S 2 x) (S 1 cinit)))", Signature.STAR)
    assert f == Exists("x", EqAtom(StarTerm("x", 2), StarTerm(CINIT, 1)))


def test_parse_constants_and_comments():
    f = parse_formula("; leading comment\n(and true (not false))", Signature.EQ)
    assert f.args == (TRUE, Not(FALSE))


def test_parse_renames_clashing_binder():
    f = parse_formula("(and (E x y) (exists x (E x y)))", Signature.EQ)
    assert f.args[1].var == "x_1"


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("(and (U \"0\" x)", 1, 15),
        ("(U \"0\" x) extra", 1, 11),
        ("\n  (foo x)", 2, 3),
        ("", 1, 1),
    ],
)
def test_syntax_errors_carry_position(text, line, column):
    with pytest.raises(FormulaSyntaxError) as e:
        parse_formula(text, Signature.TREE)
    assert (e.value.line, e.value.column) == (line, column)


def test_wrong_signature_is_rejected():
    with pytest.raises(SignatureError):
        parse_formula('(U "0" x)', Signature.PAIR)
    with pytest.raises(SignatureError):
        parse_formula('(= (app "f" x) y)', Signature.EQ)


def test_b_strings_of_different_length():
    with pytest.raises(FormulaSyntaxError, match="equal length"):
        parse_formula('(B "0" "0,1" x y)', Signature.TREE)


def test_constant_as_variable_is_rejected():
    with pytest.raises(FormulaSyntaxError, match="constant"):
        parse_formula("(exists cfin (= cfin cfin))", Signature.STAR)


@pytest.mark.parametrize(
    "text, sig",
    [
        ('(exists x (and (U "0" x) (not (B "0" "1" x y))))', Signature.TREE),
        ('(forall x (or (= (app "fg" x) y) (Cinit 2 (app "f" x))))', Signature.PAIR),
        ("(exists x (= (S 2 x) cfin))", Signature.STAR),
        ("true", Signature.EQ),
        ("false", Signature.EQ),
    ],
)
def test_printer_output_parses_back(text, sig):
    f = parse_formula(text, sig)
    assert to_sexpr(f) == text
    assert parse_formula(to_sexpr(f), sig) == f


def test_term_to_sexpr():
    assert term_to_sexpr(Term("x")) == "x"
    assert term_to_sexpr(Term("y", "fg")) == '(app "fg" y)'
    assert term_to_sexpr(StarTerm(CINIT, 2)) == "(S 2 cinit)"


@pytest.mark.parametrize(
    "suite, sig",
    [(Suite.TREE, Signature.TREE), (Suite.PAIR, Signature.PAIR), (Suite.STAR, Signature.STAR)],
)
def test_generated_formulas_parse_back_unchanged(suite, sig):
    for item in generate(suite, DEFAULT_SEED, size=100):
        f = item if suite is Suite.STAR else Exists("x", item.to_formula())
        assert parse_formula(to_sexpr(f), sig) == f, to_sexpr(f)
