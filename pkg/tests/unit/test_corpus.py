# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

import itertools
import random

import pytest

from pseudofinite_workbench.config_models import DEFAULT_SEED
from pseudofinite_workbench.corpus import (
    SUITE_MAX_ASSIGNMENTS,
    CorpusCheck,
    Suite,
    generate,
    parameter_tuples,
    random_pair_conjunction,
    run_suite,
)
from pseudofinite_workbench.formula import ClassAtom, EAtom, EqAtom
from pseudofinite_workbench.models import build_model


@pytest.mark.parametrize("suite", list(Suite))
def test_generate_is_deterministic(suite):
    first = generate(suite, DEFAULT_SEED, size=12)
    assert len(first) == 12
    assert generate(suite, DEFAULT_SEED, size=12) == first
    assert generate(suite, DEFAULT_SEED + 1, size=12) != first


def test_pair_literals_mention_x_and_stay_short():
    rng = random.Random(3)
    for _ in range(50):
        lc = random_pair_conjunction(rng)
        assert lc.var == "x"
        for atom in lc.positives + lc.negatives:
            term = atom.term if isinstance(atom, ClassAtom) else atom.left
            assert term.var == "x"
            assert term.depth <= 2


def test_pair_conjunctions_mix_class_atoms_with_equations():
    literals = [
        atom
        for lc in generate(Suite.PAIR, DEFAULT_SEED, size=40)
        for atom in lc.positives + lc.negatives
    ]
    assert any(isinstance(atom, ClassAtom) for atom in literals)
    assert all(
        atom.left != atom.right for atom in literals if isinstance(atom, (EqAtom, EAtom))
    )


def test_linked_pair_conjunction_starts_with_a_link():
    rng = random.Random(11)
    for _ in range(50):
        first = random_pair_conjunction(rng, linked=True).positives[0]
        assert isinstance(first, (EqAtom, EAtom))
        assert first.left.var == "x"
        assert first.right.var == "y"


def test_parameter_tuples_enumerates_small_spaces():
    model = build_model("pair:3,2")
    tuples = list(parameter_tuples(model, ("y",), random.Random(0)))
    assert [t["y"] for t in tuples] == list(model.domain)
    assert list(parameter_tuples(model, (), random.Random(0))) == [{}]


def test_parameter_tuples_samples_large_spaces():
    model = build_model("pair:3,2")
    names = ("y", "z", "w")
    sample = list(parameter_tuples(model, names, random.Random(5), max_assignments=40))
    assert len(sample) == 40
    assert all(set(env) == set(names) for env in sample)
    again = list(parameter_tuples(model, names, random.Random(5), max_assignments=40))
    assert sample == again


def test_corpus_check_row():
    check = CorpusCheck(Suite.STAR, 4, "interval:3", "(exists x (= x y))", "true", 4, failures=1)
    assert not check.passed
    assert check.csv_row() == {
        "suite": "star",
        "index": 4,
        "model": "interval:3",
        "formula": "(exists x (= x y))",
        "result": "true",
        "checked": 4,
        "skipped": 0,
        "failures": 1,
        "witness": "",
    }


@pytest.mark.parametrize("suite", list(Suite))
def test_run_suite_small_corpus_passes(suite):
    checks = run_suite(suite, DEFAULT_SEED, size=6)
    assert {c.index for c in checks} == set(range(6))
    assert all(c.checked + c.skipped > 0 for c in checks)
    assert [c for c in checks if not c.passed] == []


def test_run_suite_on_chosen_models():
    checks = run_suite(Suite.STAR, 1, size=3, check_models=["interval:2", "interval:5"])
    assert [c.model for c in checks] == ["interval:2", "interval:5"] * 3


def test_run_suite_reports_disagreement(mocker):
    """A result that never matches the source fails on every tuple."""
    mocker.patch(
        "pseudofinite_workbench.corpus.evaluate", side_effect=itertools.cycle([True, False])
    )
    checks = run_suite(Suite.STAR, 1, size=1, check_models=["interval:2"])
    assert checks[0].checked > 0
    assert checks[0].failures == checks[0].checked


def test_tree_suite_samples_both_string_models():
    checks = run_suite(Suite.TREE, DEFAULT_SEED, size=2)
    assert [c.model for c in checks] == ["string:4", "string:5"] * 2
    big = [c for c in checks if c.model == "string:5"]
    assert all(c.checked + c.skipped <= SUITE_MAX_ASSIGNMENTS[Suite.TREE] for c in big)


def test_pair_suite_checks_every_parameter_on_both_models():
    checks = run_suite(Suite.PAIR, DEFAULT_SEED, size=3)
    assert [c.model for c in checks] == ["pair:3,3", "pair:4,2"] * 3
    for check in checks:
        size = len(build_model(check.model))
        assert check.checked + check.skipped in (1, size)
