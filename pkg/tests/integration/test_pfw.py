# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

import csv
import json
import subprocess
from pathlib import Path
from typing import Optional

import pytest

CONFIG_DIR = Path(__file__).parent


def run_pfw(
    command: str, config: Optional[str] = None, *args: str
) -> subprocess.CompletedProcess[str]:
    """
    Run the installed ``pfw`` CLI.

    Args:
        command: Subcommand to run.
        config: Name of a config file next to this module, if any.
        *args: Further command-line arguments.

    Returns:
        The completed process, with its output captured as text.
    """
    argv = ["pfw", command]
    if config:
        argv += ["--config", str(CONFIG_DIR / config)]
    argv += list(args)
    return subprocess.run(argv, capture_output=True, text=True)


def test_count_prints_the_size_of_the_top_classes() -> None:
    result = run_pfw("count", "count-config.yaml")

    assert result.returncode == 0, f"CLI failed unexpectedly:\n{result.stdout}\n{result.stderr}"
    assert "6" in result.stdout.splitlines()


def test_qe_sentence_holds_on_every_check_model(tmp_path: Path) -> None:
    report = tmp_path / "qe.json"
    result = run_pfw("qe", "qe-pair-config.yaml", "--output", str(report))

    assert result.returncode == 0, f"CLI failed unexpectedly:\n{result.stdout}\n{result.stderr}"
    envelope = json.loads(report.read_text())
    assert envelope["schema"] == 1
    assert envelope["command"] == "qe"
    assert all(row["agree"] for row in envelope["result"]["rows"])
    assert [row["model"] for row in envelope["result"]["rows"]] == [
        "pair:3,2",
        "pair:3,3",
        "pair:4,2",
    ]


def test_polycard_agrees_with_brute_force(tmp_path: Path) -> None:
    report = tmp_path / "polycard.csv"
    result = run_pfw("polycard", "polycard-config.yaml", "--output", str(report))

    assert result.returncode == 0, f"CLI failed unexpectedly:\n{result.stdout}\n{result.stderr}"
    assert "X^2 - X" in result.stdout
    with report.open() as f:
        rows = list(csv.DictReader(f))
    assert [row["mismatches"] for row in rows] == ["0", "0"]


def test_pair_chain_descends(tmp_path: Path) -> None:
    report = tmp_path / "chain.csv"
    result = run_pfw("chain", "chain-pair-config.yaml", "--output", str(report))

    assert result.returncode == 0, f"CLI failed unexpectedly:\n{result.stdout}\n{result.stderr}"
    with report.open() as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 6
    assert {row["symbolic"] for row in rows if row["level"] != "0"} == {"first_smaller"}


def test_corpus_passes_at_the_default_seed(tmp_path: Path) -> None:
    report = tmp_path / "corpus.json"
    result = run_pfw("corpus", "corpus-config.yaml", "--output", str(report))

    assert result.returncode == 0, f"Corpus failed:\n{result.stdout}\n{result.stderr}"
    envelope = json.loads(report.read_text())
    assert envelope["passed"] is True
    assert set(envelope["result"]["totals"]) == {"tree", "pair", "star", "polycard"}


@pytest.mark.parametrize(
    "suite, args",
    [
        ("tree", ["--max-assignments", "20"]),
        ("pair", []),
        ("polycard", []),
        ("star", []),
    ],
)
def test_corpus_at_full_size_on_default_models(
    tmp_path: Path, suite: str, args: list[str]
) -> None:
    report = tmp_path / f"{suite}.json"
    result = run_pfw(
        "corpus", None, "--suite", suite, "--size", "200", "--output", str(report), *args
    )

    assert result.returncode == 0, f"Corpus failed:\n{result.stdout}\n{result.stderr}"
    totals = json.loads(report.read_text())["result"]["totals"][suite]
    assert totals["failures"] == 0
    assert totals["checks"] >= 400


def test_corpus_is_deterministic(tmp_path: Path) -> None:
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"
    for path in (first, second):
        run_pfw("corpus", None, "--suite", "star", "--size", "5", "--output", str(path))

    assert first.read_text() == second.read_text()


@pytest.mark.parametrize(
    "command, config, args",
    [
        ("chain", "chain-invalid-config.yaml", []),
        ("count", "count-config.yaml", ["--model", "pair:1,2"]),
        ("qe", None, ["--theory", "pair"]),
        ("count", "missing-config.yaml", []),
    ],
)
def test_bad_input_exits_2(command: str, config: Optional[str], args: list[str]) -> None:
    result = run_pfw(command, config, *args)

    assert result.returncode == 2, f"Expected a usage error:\n{result.stdout}\n{result.stderr}"
