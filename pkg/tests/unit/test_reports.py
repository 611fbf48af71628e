# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

import csv
import json

from pseudofinite_workbench.models import AxiomViolation
from pseudofinite_workbench.reports import render_summary, write_csv, write_json, write_report


def test_write_csv_columns_follow_first_appearance(tmp_path):
    path = tmp_path / "nested" / "rows.csv"
    write_csv(path, [{"level": 0, "count": 27}, {"level": 1, "count": 9, "ratio": "1/3"}])

    with path.open() as f:
        rows = list(csv.DictReader(f))
    assert list(rows[0]) == ["level", "count", "ratio"]
    assert rows == [
        {"level": "0", "count": "27", "ratio": ""},
        {"level": "1", "count": "9", "ratio": "1/3"},
    ]


def test_write_json_envelope(tmp_path):
    path = tmp_path / "report.json"
    write_json(path, "corpus", False, {"seed": 7}, rows=[{"suite": "tree", "failures": 1}])

    assert json.loads(path.read_text()) == {
        "schema": 1,
        "command": "corpus",
        "passed": False,
        "result": {"seed": 7, "rows": [{"suite": "tree", "failures": 1}]},
    }


def test_write_report_single_row_csv(tmp_path):
    path = tmp_path / "qe.csv"
    write_report(path, "qe", True, {"formula": "(not (Cinit 0 y))"})

    with path.open() as f:
        rows = list(csv.DictReader(f))
    assert rows == [{"command": "qe", "passed": "True", "formula": "(not (Cinit 0 y))"}]


def test_write_report_without_path_writes_nothing(tmp_path):
    write_report(None, "qe", True, {"formula": "true"})
    assert list(tmp_path.iterdir()) == []


def test_build_summary():
    text = render_summary(
        "build",
        model="pair:3,2",
        size=22,
        class_sizes={0: 16, 1: 4, 2: 2},
        audited=True,
        violations=[AxiomViolation("A3", "x=(2,(0,))", "f(x) != x")],
    )
    assert text.splitlines() == [
        "pair:3,2: 22 elements",
        "class sizes: 0=16 1=4 2=2",
        "audit: FAIL, 1 violation(s)",
        "  axiom A3 [x=(2,(0,))]: f(x) != x",
    ]


def test_qe_summary():
    text = render_summary(
        "qe",
        variants={"completed": "(not (Cinit 0 y))"},
        checks=[
            {"model": "pair:3,2", "agree": True, "witness": None},
            {"model": "pair:4,2", "agree": False, "witness": "y=0"},
        ],
        passed=False,
    )
    assert text.splitlines() == [
        "completed: (not (Cinit 0 y))",
        "check pair:3,2: agree",
        "check pair:4,2: DISAGREE at y=0",
        "FAIL",
    ]


def test_corpus_summary_passes_without_failures():
    text = render_summary(
        "corpus", seed=5, totals={"star": {"checks": 10, "failures": 0}}, failing=[]
    )
    assert text.splitlines() == ["corpus seed 5", "star: 10 check(s), 0 failure(s)", "PASS"]
