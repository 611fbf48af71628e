# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

from fractions import Fraction

import pytest

from pseudofinite_workbench.counting import DeltaVerdict, EmptySweepError
from pseudofinite_workbench.gms import (
    ChainDepthError,
    ChainKind,
    build_chain,
    verify_chain,
)
from pseudofinite_workbench.models import build_model


@pytest.mark.parametrize(
    "kind, depth, sweep",
    [
        (ChainKind.SA_TREE, 2, None),
        (ChainKind.A_PAIR, 2, [(4, 2), (4, 3)]),
        (ChainKind.A_EQCLASS, 2, [(4,), (5,)]),
    ],
)
def test_shipped_chains_pass(kind, depth, sweep):
    report = verify_chain(build_chain(kind, depth, sweep))
    assert report.counterexamples == []
    assert [v.level for v in report.verdicts] == list(range(1, depth + 1))
    assert all(v.symbolic.verdict is DeltaVerdict.FIRST_SMALLER for v in report.verdicts)
    assert all(v.empirical.verdict is DeltaVerdict.FIRST_SMALLER for v in report.verdicts)
    assert report.passed


def test_tree_chain_counts():
    """Each level keeps one letter's worth of strings."""
    report = verify_chain(build_chain(ChainKind.SA_TREE, 2, [(3,), (4,)]))
    counts = {(row.level, row.point): row.count for row in report.rows}
    assert counts == {
        (0, (3,)): 27,
        (1, (3,)): 9,
        (2, (3,)): 3,
        (0, (4,)): 256,
        (1, (4,)): 64,
        (2, (4,)): 16,
    }
    assert {row.ratio_to_previous for row in report.rows if row.level} == {
        Fraction(1, 3),
        Fraction(1, 4),
    }


def test_tree_chain_follows_branch():
    chain = build_chain(ChainKind.SA_TREE, 2, branch=(1, 2))
    assert chain.branch == (1, 2)
    assert chain.levels[2].formula.sigma == (1, 2)


def test_pair_chain_parameters_sit_in_successive_classes():
    chain = build_chain(ChainKind.A_PAIR, 2, [(4, 2)])
    model = build_model("pair:4,2")
    params = chain.parameters(model, chain.levels[2])
    assert [model.class_of(params[name]) for name in ("a0", "a1", "a2")] == [0, 1, 2]


def test_pair_chain_counts_partial_sums():
    report = verify_chain(build_chain(ChainKind.A_PAIR, 2, [(4, 2), (4, 3)]))
    counts = {(row.level, row.point): row.count for row in report.rows}
    assert counts[(0, (4, 2))] == 2 + 4 + 16
    assert counts[(1, (4, 3))] == 3 + 9
    assert counts[(2, (4, 3))] == 3


def test_csv_rows():
    report = verify_chain(build_chain(ChainKind.A_EQCLASS, 1, [(4,), (5,)]))
    rows = report.csv_rows()
    assert [(r["level"], r["params"]) for r in rows] == [(0, "4"), (0, "5"), (1, "4"), (1, "5")]
    assert rows[0]["ratio_to_previous"] == ""
    assert rows[0]["symbolic"] == ""
    assert rows[2] == {
        "kind": "a_eqclass",
        "level": 1,
        "params": "4",
        "count": 84,
        "ratio_to_previous": "21/85",
        "symbolic": "first_smaller",
        "empirical": "first_smaller",
    }


@pytest.mark.parametrize(
    "kind, depth, sweep, branch, error",
    [
        (ChainKind.A_PAIR, 3, [(4, 2)], None, ChainDepthError),
        (ChainKind.A_EQCLASS, 4, [(4,)], None, ChainDepthError),
        (ChainKind.SA_TREE, 1, [(3,)], (3,), ChainDepthError),
        (ChainKind.SA_TREE, 2, [(3,)], (0,), ValueError),
        (ChainKind.SA_TREE, 0, None, None, ValueError),
        (ChainKind.A_EQCLASS, 1, [], None, EmptySweepError),
    ],
)
def test_build_chain_errors(kind, depth, sweep, branch, error):
    with pytest.raises(error):
        build_chain(kind, depth, sweep, branch)


def test_report_fails_on_wrong_closed_form(mocker):
    """A counted size that disagrees with the closed form is a counterexample."""
    chain = build_chain(ChainKind.A_EQCLASS, 1, [(4,), (5,)])
    mocker.patch("pseudofinite_workbench.gms.definable_set", return_value=[])
    report = verify_chain(chain)
    assert not report.passed
    assert any("counted 0" in c for c in report.counterexamples)
