# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

import json
from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from pseudofinite_workbench.counting import Point
from pseudofinite_workbench.models import DEFAULT_BUDGET, FamilySpec
from pseudofinite_workbench.normal_forms import DEFAULT_DNF_CAP

DEFAULT_SEED = 20240917
REPORT_SCHEMA = 1


def parse_sweep(text: str) -> List[Point]:
    """
    Parse sweep syntax: points separated by commas, coordinates by colons.

    ``"3,4,5"`` gives ``[(3,), (4,), (5,)]`` and ``"4:2,4:3"`` gives ``[(4, 2), (4, 3)]``.

    Raises:
        ValueError: If a coordinate is not a positive integer or points differ in arity.
    """
    points = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            point = tuple(int(c) for c in chunk.split(":"))
        except ValueError as e:
            raise ValueError(f"Invalid sweep point {chunk!r}") from e
        if any(c < 1 for c in point):
            raise ValueError(f"Sweep coordinates must be positive, got {chunk!r}")
        points.append(point)
    if len({len(p) for p in points}) > 1:
        raise ValueError(f"Sweep points {text!r} do not share one arity")
    return points


def parse_param(text: str) -> tuple[str, int]:
    """
    Parse ``name=index``, an element given by its position in the domain order.

    Raises:
        ValueError: If ``text`` is not of that shape.
    """
    name, sep, value = text.partition("=")
    name = name.strip()
    if not sep or not name:
        raise ValueError(f"Invalid parameter {text!r}, expected <name>=<domain index>")
    try:
        index = int(value)
    except ValueError as e:
        raise ValueError(f"Parameter {name!r} needs an integer domain index, got {value!r}") from e
    if index < 0:
        raise ValueError(f"Parameter {name!r} has negative domain index {index}")
    return name, index


class ExperimentConfig(BaseModel):
    """
    Settings shared by every subcommand, read from a config file or from flags.

    Attributes:
        model (Optional[str]): Family member such as ``pair:4,2``.
        formula (Optional[str]): Formula in s-expression syntax.
        theory (Optional[str]): ``tree``, ``pair`` or ``star``.
        var (str): Variable that is counted or eliminated.
        params (Dict[str, int]): Parameter values as domain indices.
        check_models (List[str]): Family members used for brute-force cross-validation.
        sweep (Optional[List[tuple]]): Sweep points for chains.
        kind (Optional[str]): Chain kind.
        depth (Optional[int]): Chain depth.
        nmax (int): Largest multiplier tried by the empirical delta comparison.
        seed (int): Corpus seed.
        size (int): Corpus size per suite.
        output (Optional[Path]): Report path; ``.json`` writes JSON, anything else CSV.
        budget (int): Largest model, in elements, that may be built.
        dnf_cap (int): DNF literal budget.
        completed (bool): Keep sort conditions on linked parameters in tree eliminations.
    """

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    model: Optional[str] = None
    formula: Optional[str] = None
    theory: Optional[Literal["tree", "pair", "star"]] = None
    var: str = Field(default="x", min_length=1)
    params: Dict[str, int] = Field(default_factory=dict)
    check_models: List[str] = Field(default_factory=list, alias="check-models")
    sweep: Optional[List[tuple[int, ...]]] = None
    kind: Optional[Literal["sa_tree", "a_pair", "a_eqclass"]] = None
    depth: Optional[int] = Field(default=None, ge=1)
    nmax: int = Field(default=8, ge=1)
    seed: int = DEFAULT_SEED
    size: int = Field(default=200, ge=1)
    output: Optional[Path] = None
    budget: int = Field(default=DEFAULT_BUDGET, ge=1)
    dnf_cap: int = Field(default=DEFAULT_DNF_CAP, ge=1, alias="dnf-cap")
    completed: bool = True

    @field_validator("model")
    @classmethod
    def check_model(cls, value: Optional[str]) -> Optional[str]:
        """
        Normalise a family spec through its parser.

        Raises:
            ValueError: If the spec does not parse.
        """
        return None if value is None else str(FamilySpec.parse(value))

    @field_validator("check_models")
    @classmethod
    def check_check_models(cls, value: List[str]) -> List[str]:
        """Normalise every cross-validation model."""
        return [str(FamilySpec.parse(spec)) for spec in value]

    @field_validator("params")
    @classmethod
    def check_params(cls, value: Dict[str, int]) -> Dict[str, int]:
        """Reject negative domain indices."""
        for name, index in value.items():
            if index < 0:
                raise ValueError(f"Parameter {name!r} has negative domain index {index}")
        return value

    @field_validator("sweep", mode="before")
    @classmethod
    def check_sweep(cls, value: Union[str, int, list, None]) -> Optional[List[tuple[int, ...]]]:
        """Accept ``"4:2,4:3"``, a single integer, or a list of points."""
        if value is None:
            return None
        if isinstance(value, int):
            value = str(value)
        if isinstance(value, str):
            points = parse_sweep(value)
        else:
            points = [tuple(p) if isinstance(p, (list, tuple)) else (p,) for p in value]
            parse_sweep(",".join(":".join(str(c) for c in p) for p in points))
        if not points:
            raise ValueError("Sweep must contain at least one point")
        return points

    @model_validator(mode="after")
    def check_output_suffix(self) -> "ExperimentConfig":
        """
        Ensure the report path has a supported suffix.

        Returns:
            ExperimentConfig: The validated model instance.

        Raises:
            ValueError: If ``output`` is neither ``.csv`` nor ``.json``.
        """
        if self.output is not None and self.output.suffix not in (".csv", ".json"):
            raise ValueError(f"Report path {self.output} must end in .csv or .json")
        return self

    def merged(self, **overrides) -> "ExperimentConfig":
        """Copy with every override that is not ``None`` applied, validated again."""
        data = self.model_dump()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return ExperimentConfig.model_validate(data)


def load_config(path: Path) -> ExperimentConfig:
    """
    Load an ExperimentConfig from a YAML or JSON file.

    Raises:
        FileNotFoundError: If ``path`` does not exist.
        ValueError: If the file is not a mapping.
        pydantic.ValidationError: If a field is invalid or unknown.
    """
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    text = path.read_text()
    data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ValueError(f"Config file {path} must hold a mapping")
    return ExperimentConfig.model_validate(data)


class ReportEnvelope(BaseModel):
    """
    Top level of every JSON report.

    Attributes:
        schema_version (int): Report schema version, written as ``schema``.
        command (str): Subcommand that produced the report.
        passed (bool): Whether every check of the run passed.
        result (dict): Subcommand-specific payload.
    """

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_version: int = Field(default=REPORT_SCHEMA, alias="schema")
    command: str = Field(min_length=1)
    passed: bool = True
    result: dict = Field(default_factory=dict)
