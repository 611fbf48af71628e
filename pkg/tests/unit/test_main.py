# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

import csv
import json
from pathlib import Path
from unittest import mock

import pytest
import yaml
from click.testing import CliRunner, Result

from pseudofinite_workbench.corpus import CorpusCheck, Suite
from pseudofinite_workbench.formula import FALSE
from pseudofinite_workbench.main import main

BOTTOM_CLASSES_REMOVED = "(and (not (Cinit 0 x)) (not (Cinit 1 x)))"


@pytest.fixture
def runner() -> CliRunner:
    """Provides a Click CLI runner for invoking CLI commands."""
    return CliRunner()


def test_count_drops_the_two_bottom_classes(runner: CliRunner) -> None:
    """On pair:4,2 only the classes of sizes 4 and 2 remain."""
    result: Result = runner.invoke(
        main, ["count", "--model", "pair:4,2", "--formula", BOTTOM_CLASSES_REMOVED]
    )

    assert result.exit_code == 0
    assert "6" in result.output.splitlines()


def test_count_show_lists_members(runner: CliRunner) -> None:
    result = runner.invoke(
        main, ["count", "--model", "string:2", "--formula", '(U "1" x)', "--show"]
    )

    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert "2" in lines
    assert any(len(line.split()) == 2 for line in lines)


def test_count_reads_config_and_writes_json(runner: CliRunner, tmp_path: Path) -> None:
    """Settings come from the config file and the report lands at its output path."""
    report = tmp_path / "count.json"
    config = tmp_path / "count.yaml"
    config.write_text(
        yaml.safe_dump(
            {"model": "pair:4,2", "formula": BOTTOM_CLASSES_REMOVED, "output": str(report)}
        )
    )

    result = runner.invoke(main, ["count", "--config", str(config)])

    assert result.exit_code == 0
    envelope = json.loads(report.read_text())
    assert envelope["command"] == "count"
    assert envelope["passed"] is True
    assert envelope["result"]["count"] == 6
    assert envelope["result"]["model"] == "pair:4,2"


def test_count_with_parameter(runner: CliRunner) -> None:
    """The element at index 0 of pair:3,2 is in the first class; f has no preimage there."""
    result = runner.invoke(
        main,
        ["count", "--model", "pair:3,2", "--formula", '(= (app "f" x) y)', "--param", "y=0"],
    )

    assert result.exit_code == 0
    assert "0" in result.output.splitlines()


@pytest.mark.parametrize(
    "args",
    [
        ["count", "--formula", BOTTOM_CLASSES_REMOVED],
        ["count", "--model", "pair:4,2", "--formula", "(and (Cinit 0 x)"],
        ["count", "--model", "pair:4,2", "--formula", '(U "0" x)'],
        ["count", "--model", "pair:3,2", "--formula", "(E x y)", "--param", "y=99"],
        ["count", "--model", "pair:3,2", "--formula", "(E x y)"],
        ["count", "--model", "ring:3", "--formula", "(E x y)"],
        ["count", "--model", "string:9", "--formula", '(U "0" x)', "--budget", "100"],
    ],
    ids=[
        "missing-model",
        "syntax",
        "wrong-signature",
        "parameter-out-of-range",
        "unassigned-parameter",
        "unknown-family",
        "over-budget",
    ],
)
def test_count_usage_errors(runner: CliRunner, args: list[str]) -> None:
    result = runner.invoke(main, args)

    assert result.exit_code == 2


def test_missing_config_file_is_a_usage_error(runner: CliRunner, tmp_path: Path) -> None:
    result = runner.invoke(main, ["count", "--config", str(tmp_path / "missing.yaml")])

    assert result.exit_code == 2


def test_build_audits_pair_model(runner: CliRunner, tmp_path: Path) -> None:
    report = tmp_path / "build.csv"
    result = runner.invoke(
        main, ["build", "--model", "pair:3,2", "--audit", "--output", str(report)]
    )

    assert result.exit_code == 0
    assert "pair:3,2: 22 elements" in result.output
    assert "class sizes: 0=16 1=4 2=2" in result.output
    with report.open() as f:
        (row,) = list(csv.DictReader(f))
    assert row["command"] == "build"
    assert row["passed"] == "True"


def test_build_rejects_audit_of_intervals(runner: CliRunner) -> None:
    result = runner.invoke(main, ["build", "--model", "interval:3", "--audit"])

    assert result.exit_code == 2


def test_qe_pair_preimage(runner: CliRunner) -> None:
    result = runner.invoke(
        main, ["qe", "--theory", "pair", "--formula", '(exists x (= (app "f" x) y))']
    )

    assert result.exit_code == 0
    assert "check pair:3,2: agree" in result.output
    assert "PASS" in result.output.splitlines()


def test_qe_tree_verbose_prints_both_forms(runner: CliRunner) -> None:
    result = runner.invoke(
        main,
        ["qe", "--theory", "tree", "--formula", '(exists x (B "0" "1" x y))', "--verbose"],
    )

    assert result.exit_code == 0
    assert any(line.startswith("result: ") for line in result.output.splitlines())
    assert any(line.startswith("bare: ") for line in result.output.splitlines())


@mock.patch("pseudofinite_workbench.main.eliminate_quantifiers", return_value=FALSE)
def test_qe_failed_check_exits_1(mock_eliminate: mock.MagicMock, runner: CliRunner) -> None:
    """A wrong elimination is caught by the brute-force check."""
    result = runner.invoke(
        main, ["qe", "--theory", "pair", "--formula", '(exists x (= (app "f" x) y))']
    )

    assert result.exit_code == 1
    assert "DISAGREE" in result.output
    fins = [c.kwargs["fin"] for c in mock_eliminate.call_args_list if "fin" in c.kwargs]
    assert fins == [2, 2, 3]


@mock.patch(
    "pseudofinite_workbench.main.eliminate_quantifiers", side_effect=RuntimeError("boom")
)
def test_qe_unexpected_error_exits_1(mock_eliminate: mock.MagicMock, runner: CliRunner) -> None:
    result = runner.invoke(main, ["qe", "--theory", "star", "--formula", "(exists x (= x y))"])

    assert result.exit_code == 1
    mock_eliminate.assert_called_once()


def test_qe_requires_theory(runner: CliRunner) -> None:
    result = runner.invoke(main, ["qe", "--formula", "(exists x (= x y))"])

    assert result.exit_code == 2
    assert "--theory" in result.output


def test_polycard_preimages(runner: CliRunner, tmp_path: Path) -> None:
    report = tmp_path / "polycard.json"
    result = runner.invoke(
        main, ["polycard", "--formula", '(= (app "f" x) y)', "--output", str(report)]
    )

    assert result.exit_code == 0
    assert "0 mismatch(es)" in result.output
    envelope = json.loads(report.read_text())
    assert envelope["passed"] is True
    assert envelope["result"]["rows"][0]["model"] == "pair:3,2"


@pytest.mark.parametrize(
    "formula",
    [
        '(or (= (app "f" x) y) (= (app "g" x) y))',
        '(exists z (= (app "f" x) z))',
        '(and (= (app "f" x) y) (E y z))',
    ],
)
def test_polycard_rejects_non_conjunctions(runner: CliRunner, formula: str) -> None:
    result = runner.invoke(main, ["polycard", "--formula", formula])

    assert result.exit_code == 2


def test_chain_writes_rows(runner: CliRunner, tmp_path: Path) -> None:
    report = tmp_path / "chain.csv"
    result = runner.invoke(
        main,
        [
            "chain",
            "--kind",
            "a_eqclass",
            "--depth",
            "1",
            "--sweep",
            "4,5",
            "--output",
            str(report),
        ],
    )

    assert result.exit_code == 0
    assert "PASS" in result.output.splitlines()
    with report.open() as f:
        rows = list(csv.DictReader(f))
    assert [row["count"] for row in rows if row["level"] == "1" and row["params"] == "4"] == ["84"]


def test_chain_too_deep_is_a_usage_error(runner: CliRunner) -> None:
    result = runner.invoke(
        main, ["chain", "--kind", "a_pair", "--depth", "3", "--sweep", "4:2"]
    )

    assert result.exit_code == 2


def test_star_from_pair(runner: CliRunner) -> None:
    result = runner.invoke(
        main, ["star", "--formula", '(exists x (E (app "f" x) y))', "--from-pair"]
    )

    assert result.exit_code == 0
    assert any(line.startswith("pulled_back: ") for line in result.output.splitlines())
    assert "check interval:6: agree" in result.output


def test_star_rejects_pair_equality(runner: CliRunner) -> None:
    result = runner.invoke(
        main, ["star", "--formula", '(exists x (= (app "f" x) y))', "--from-pair"]
    )

    assert result.exit_code == 2


@mock.patch("pseudofinite_workbench.main.run_suite")
def test_corpus_failure_exits_1(mock_run: mock.MagicMock, runner: CliRunner) -> None:
    mock_run.return_value = [
        CorpusCheck(Suite.STAR, 0, "interval:2", "(exists x (= x y))", "true", 3, failures=1)
    ]

    result = runner.invoke(main, ["corpus", "--suite", "star", "--seed", "7", "--size", "1"])

    assert result.exit_code == 1
    mock_run.assert_called_once()
    assert mock_run.call_args.args[:3] == (Suite.STAR, 7, 1)
    assert "FAIL" in result.output


@mock.patch("pseudofinite_workbench.main.run_suite", return_value=[])
def test_corpus_runs_every_suite_by_default(mock_run: mock.MagicMock, runner: CliRunner) -> None:
    result = runner.invoke(main, ["corpus", "--size", "1"])

    assert result.exit_code == 0
    assert [c.args[0] for c in mock_run.call_args_list] == list(Suite)


def test_corpus_check_model_needs_one_suite(runner: CliRunner) -> None:
    result = runner.invoke(main, ["corpus", "--check-model", "pair:3,2"])

    assert result.exit_code == 2
