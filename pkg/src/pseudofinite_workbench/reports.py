# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""CSV and JSON reports and the plain-text summaries printed by the CLI."""

import csv
import json
from importlib.resources import files
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from jinja2 import Template

from pseudofinite_workbench.config_models import ReportEnvelope
from pseudofinite_workbench.logger import setup_logger

logger = setup_logger(__name__)


def _load_template(name: str) -> Template:
    """Load a summary template from the package resources."""
    template_path = files("pseudofinite_workbench.templates").joinpath(f"{name}.txt.j2")
    return Template(template_path.read_text(), trim_blocks=True, lstrip_blocks=True)


def render_summary(name: str, **context: Any) -> str:
    """Render the ``name`` summary template; trailing whitespace is dropped."""
    return _load_template(name).render(**context).rstrip()


def _fieldnames(rows: Sequence[Mapping[str, Any]]) -> list[str]:
    names: dict[str, None] = {}
    for row in rows:
        names.update(dict.fromkeys(row))
    return list(names)


def write_csv(path: Path, rows: Sequence[Mapping[str, Any]]) -> None:
    """Write ``rows`` with a header row; columns follow first appearance."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=_fieldnames(rows), restval="")
        writer.writeheader()
        writer.writerows(rows)


def write_json(
    path: Path, command: str, passed: bool, result: Mapping[str, Any], rows: Iterable = ()
) -> None:
    """Write a schema-versioned JSON report."""
    payload = dict(result)
    rows = list(rows)
    if rows:
        payload["rows"] = rows
    envelope = ReportEnvelope(command=command, passed=passed, result=payload)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(envelope.model_dump(by_alias=True), indent=2, default=str) + "\n")


def write_report(
    path: Path | None,
    command: str,
    passed: bool,
    result: Mapping[str, Any],
    rows: Sequence[Mapping[str, Any]] = (),
) -> None:
    """
    Write the report of one CLI run, if a path was given.

    ``.json`` paths get the full envelope; any other path gets the rows as CSV, or a single row
    built from ``result`` when there are none.
    """
    if path is None:
        return
    if path.suffix == ".json":
        write_json(path, command, passed, result, rows)
    else:
        write_csv(path, list(rows) or [{"command": command, "passed": passed, **result}])
    logger.info(f"Report written to {path}")
