# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

import random
from collections import Counter
from dataclasses import asdict
from pathlib import Path
from typing import Callable, Iterable

import click

from pseudofinite_workbench.config_models import (
    ExperimentConfig,
    load_config,
    parse_param,
    parse_sweep,
)
from pseudofinite_workbench.corpus import (
    DEFAULT_MAX_ASSIGNMENTS,
    SUITE_MAX_ASSIGNMENTS,
    Suite,
    parameter_tuples,
    run_suite,
)
from pseudofinite_workbench.counting import EmptySweepError, UnboundAnchorError
from pseudofinite_workbench.formula import (
    TRUE,
    Formula,
    Signature,
    SignatureError,
    free_vars,
    is_quantifier_free,
    parse_digits,
)
from pseudofinite_workbench.gms import ChainDepthError, ChainKind, build_chain, verify_chain
from pseudofinite_workbench.logger import setup_logger
from pseudofinite_workbench.models import (
    Assignment,
    FamilyKind,
    FiniteStructure,
    ModelBudgetError,
    UnassignedVariableError,
    audit_pair_axioms,
    audit_tree_axioms,
    build_model,
    count,
    definable_set,
    equivalent_on,
)
from pseudofinite_workbench.normal_forms import literal_split
from pseudofinite_workbench.qe_pair import cauchy_bound, polycard_literals
from pseudofinite_workbench.quantifier_elimination import Theory, eliminate_quantifiers
from pseudofinite_workbench.reports import render_summary, write_report
from pseudofinite_workbench.sexpr import FormulaSyntaxError, parse_formula, to_sexpr
from pseudofinite_workbench.star import (
    EquivalenceFormulaError,
    pull_back,
    qe_star,
    translate_to_star,
)

logger = setup_logger(__name__)

# Bad input from the command line or the config file; reported as usage errors (exit 2).
USAGE_ERRORS = (
    ValueError,
    FileNotFoundError,
    FormulaSyntaxError,
    SignatureError,
    UnassignedVariableError,
    ModelBudgetError,
    ChainDepthError,
    EmptySweepError,
    EquivalenceFormulaError,
    UnboundAnchorError,
)

DEFAULT_QE_CHECKS = {
    Theory.TREE: ("string:3", "string:4"),
    Theory.PAIR: ("pair:3,2", "pair:3,3", "pair:4,2"),
    Theory.STAR: tuple(f"interval:{length}" for length in range(1, 13)),
}
DEFAULT_POLYCARD_CHECKS = ("pair:3,2", "pair:3,3", "pair:4,2")


def _settings(config_path: str | None, **flags) -> ExperimentConfig:
    """Settings from the config file, if any, with every explicit flag applied on top."""
    try:
        base = load_config(Path(config_path)) if config_path else ExperimentConfig()
        return base.merged(**flags)
    except (ValueError, FileNotFoundError) as e:
        raise click.UsageError(str(e)) from e


def _require(value, option: str):
    if value is None:
        raise click.UsageError(f"Missing option '--{option}' (or the same key in --config)")
    return value


def _params(values: Iterable[str]) -> dict[str, int] | None:
    params = dict(parse_param(v) for v in values)
    return params or None


def _assignment(model: FiniteStructure, params: dict[str, int]) -> Assignment:
    """Domain elements for parameters given by their domain index."""
    out = {}
    for name, index in params.items():
        if index >= len(model):
            raise ValueError(
                f"Parameter {name}={index} is out of range, "
                f"{model.spec} has {len(model)} elements"
            )
        out[name] = model.domain[index]
    return out


def _guarded(action: Callable[[], bool], what: str) -> None:
    """
    Run a subcommand body and turn its outcome into the exit status.

    ``action`` returns whether every check passed. Input errors become usage errors; anything
    else is logged with its traceback and exits with status 1.
    """
    try:
        passed = action()
    except click.UsageError:
        raise
    except USAGE_ERRORS as e:
        raise click.UsageError(str(e)) from e
    except Exception as e:
        logger.exception(f"Failed to {what}: {e}")
        click.get_current_context().exit(1)
    if not passed:
        click.get_current_context().exit(1)


def _check_equivalence(
    source: Formula,
    result: Formula,
    specs: Iterable[str],
    budget: int,
    result_in: Callable[[FiniteStructure], Formula] | None = None,
):
    """Brute-force comparison of ``source`` and ``result`` on each model.

    ``result_in`` recomputes the result for a given model when it depends on the model.
    """
    checks = []
    for spec in specs:
        model = build_model(spec, budget)
        witness = equivalent_on(model, source, result_in(model) if result_in else result)
        checks.append(
            {
                "model": str(model.spec),
                "agree": witness is None,
                "witness": (
                    ""
                    if witness is None
                    else " ".join(
                        f"{k}={model.format_element(v)}" for k, v in sorted(witness.items())
                    )
                ),
            }
        )
    return checks


config_option = click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="YAML or JSON file with default settings; explicit flags win.",
)
output_option = click.option(
    "--output",
    type=click.Path(dir_okay=False),
    default=None,
    help="Report path; .json writes a JSON report, .csv a CSV report.",
)
budget_option = click.option(
    "--budget", type=int, default=None, help="Largest model, in elements, that may be built."
)
check_model_option = click.option(
    "--check-model",
    "check_models",
    multiple=True,
    help="Family member to cross-validate on, e.g. pair:3,2. May be repeated.",
)


@click.group()
def main():
    """Workbench for pseudofinite dimension and quantifier elimination experiments."""


@main.command()
@config_option
@click.option("--model", default=None, help="Family member, e.g. string:3 or pair:4,2.")
@click.option("--audit", is_flag=True, default=False, help="Check the family axioms.")
@click.option(
    "--samples",
    type=int,
    default=None,
    help="Check each tree axiom schema on this many random instances instead of all.",
)
@output_option
@budget_option
def build(
    config_path: str | None,
    model: str | None,
    audit: bool,
    samples: int | None,
    output: str | None,
    budget: int | None,
) -> None:
    """Build a structure, print its size and class sizes, and optionally audit its axioms."""
    cfg = _settings(config_path, model=model, output=output, budget=budget)
    spec = _require(cfg.model, "model")

    def action() -> bool:
        structure = build_model(spec, cfg.budget)
        classes = Counter(structure.class_of(e) for e in structure.domain)
        violations = []
        if audit:
            if structure.spec.kind is FamilyKind.STRING:
                violations = audit_tree_axioms(structure, samples, cfg.seed)
            elif structure.spec.kind is FamilyKind.PAIR:
                violations = audit_pair_axioms(structure)
            else:
                raise ValueError(f"No axiom audit for {structure.spec.kind.value} models")
        class_sizes = {str(c): n for c, n in sorted(classes.items()) if c is not None}
        click.echo(
            render_summary(
                "build",
                model=str(structure.spec),
                size=len(structure),
                class_sizes=class_sizes,
                audited=audit,
                violations=violations,
            )
        )
        result = {
            "model": str(structure.spec),
            "size": len(structure),
            "class_sizes": class_sizes,
            "violations": [asdict(v) for v in violations],
        }
        write_report(cfg.output, "build", not violations, result)
        return not violations

    _guarded(action, "build model")


@main.command(name="count")
@config_option
@click.option("--model", default=None, help="Family member, e.g. pair:4,2.")
@click.option("--formula", default=None, help="Formula in s-expression syntax.")
@click.option("--var", default=None, help="Counted variable (default: x).")
@click.option(
    "--param", "params", multiple=True, help="Parameter as name=<domain index>. May be repeated."
)
@click.option("--show", is_flag=True, default=False, help="List the elements that are counted.")
@output_option
@budget_option
def count_command(
    config_path: str | None,
    model: str | None,
    formula: str | None,
    var: str | None,
    params: tuple[str, ...],
    show: bool,
    output: str | None,
    budget: int | None,
) -> None:
    """Count the elements of a model satisfying a formula with its parameters fixed."""

    def action() -> bool:
        cfg = _settings(
            config_path,
            model=model,
            formula=formula,
            var=var,
            params=_params(params),
            output=output,
            budget=budget,
        )
        structure = build_model(_require(cfg.model, "model"), cfg.budget)
        f = parse_formula(_require(cfg.formula, "formula"), structure.signature)
        env = _assignment(structure, cfg.params)
        n = count(structure, f, env, (cfg.var,))
        click.echo(n)
        result = {"model": str(structure.spec), "formula": to_sexpr(f), "count": n}
        if show:
            solutions = definable_set(structure, f, env, (cfg.var,))
            members = [structure.format_element(t[0]) for t in solutions]
            click.echo(" ".join(members))
            result["members"] = members
        write_report(cfg.output, "count", True, result)
        return True

    _guarded(action, "count")


@main.command()
@config_option
@click.option(
    "--theory", type=click.Choice([t.value for t in Theory]), default=None, help="Theory."
)
@click.option("--formula", default=None, help="Formula in s-expression syntax.")
@click.option(
    "--bare",
    is_flag=True,
    default=False,
    help="Tree theory: leave out the sort conditions on linked parameters.",
)
@click.option("--verbose", is_flag=True, default=False, help="Tree theory: print both forms.")
@check_model_option
@output_option
@budget_option
def qe(
    config_path: str | None,
    theory: str | None,
    formula: str | None,
    bare: bool,
    verbose: bool,
    check_models: tuple[str, ...],
    output: str | None,
    budget: int | None,
) -> None:
    """Eliminate quantifiers and check the result against brute force."""

    def action() -> bool:
        cfg = _settings(
            config_path,
            theory=theory,
            formula=formula,
            check_models=list(check_models) or None,
            output=output,
            budget=budget,
            completed=False if bare else None,
        )
        th = Theory(_require(cfg.theory, "theory"))
        source = parse_formula(_require(cfg.formula, "formula"), th.signature)
        result = eliminate_quantifiers(source, th, cfg.dnf_cap, cfg.completed)
        variants = {"result": to_sexpr(result)}
        if verbose and th is Theory.TREE:
            other = eliminate_quantifiers(source, th, cfg.dnf_cap, not cfg.completed)
            variants["completed" if not cfg.completed else "bare"] = to_sexpr(other)

        def relative(model: FiniteStructure) -> Formula:
            # class conditions on closed terms are decided in the check model
            return eliminate_quantifiers(source, th, cfg.dnf_cap, cfg.completed, fin=model.fin)

        checks = _check_equivalence(
            source,
            result,
            cfg.check_models or DEFAULT_QE_CHECKS[th],
            cfg.budget,
            relative if th is Theory.PAIR else None,
        )
        passed = all(c["agree"] for c in checks)
        click.echo(render_summary("qe", variants=variants, checks=checks, passed=passed))
        write_report(
            cfg.output,
            "qe",
            passed,
            {"theory": th.value, "formula": to_sexpr(source), **variants},
            checks,
        )
        return passed

    _guarded(action, "eliminate quantifiers")


@main.command()
@config_option
@click.option("--formula", default=None, help="Conjunction of pair literals.")
@click.option("--var", default=None, help="Counted variable (default: x).")
@click.option(
    "--max-assignments",
    type=int,
    default=DEFAULT_MAX_ASSIGNMENTS,
    show_default=True,
    help="Parameter tuples per model above which a seeded sample is checked.",
)
@check_model_option
@output_option
@budget_option
def polycard(
    config_path: str | None,
    formula: str | None,
    var: str | None,
    max_assignments: int,
    check_models: tuple[str, ...],
    output: str | None,
    budget: int | None,
) -> None:
    """Compute a polynomial cardinality definition and check it against brute force."""

    def action() -> bool:
        cfg = _settings(
            config_path,
            formula=formula,
            var=var,
            check_models=list(check_models) or None,
            output=output,
            budget=budget,
        )
        f = parse_formula(_require(cfg.formula, "formula"), Signature.PAIR)
        if not is_quantifier_free(f):
            raise ValueError("polycard needs a quantifier-free conjunction of literals")
        clauses = literal_split(f, cfg.dnf_cap)
        if len(clauses) != 1:
            raise ValueError(f"polycard needs a single conjunction, got {len(clauses)} disjuncts")
        lc, rest = clauses[0].partition(cfg.var)
        if rest != TRUE:
            raise ValueError(f"Every literal must mention {cfg.var}")
        p = polycard_literals(lc, cfg.dnf_cap)
        definition = p.to_dict()

        rng = random.Random(cfg.seed)
        names = tuple(v for v in free_vars(f) if v != cfg.var)
        checks = []
        for spec in cfg.check_models or DEFAULT_POLYCARD_CHECKS:
            structure = build_model(spec, cfg.budget)
            relative = polycard_literals(lc, cfg.dnf_cap, structure.fin)
            mismatches, total, witness = 0, 0, ""
            for env in parameter_tuples(structure, names, rng, max_assignments):
                total += 1
                expected = count(structure, f, env, (cfg.var,))
                if relative.value_in(structure, env) != expected:
                    mismatches += 1
                    witness = witness or " ".join(
                        f"{k}={structure.format_element(v)}" for k, v in sorted(env.items())
                    )
            checks.append(
                {
                    "model": str(structure.spec),
                    "checked": total,
                    "mismatches": mismatches,
                    "agree": mismatches == 0,
                    "witness": witness,
                }
            )
        passed = all(c["agree"] for c in checks)
        click.echo(
            render_summary(
                "polycard",
                definition=definition,
                bound=cauchy_bound(p),
                checks=checks,
                passed=passed,
            )
        )
        write_report(cfg.output, "polycard", passed, definition, checks)
        return passed

    _guarded(action, "compute polynomial cardinality")


@main.command()
@config_option
@click.option(
    "--kind", type=click.Choice([k.value for k in ChainKind]), default=None, help="Chain kind."
)
@click.option("--depth", type=int, default=None, help="Index of the last level.")
@click.option("--sweep", default=None, help="Sweep points, e.g. 3,4,5 or 4:2,4:3.")
@click.option("--branch", default=None, help="sa_tree: digit string naming the branch.")
@click.option("--nmax", type=int, default=None, help="Largest multiplier for empirical verdicts.")
@output_option
@budget_option
def chain(
    config_path: str | None,
    kind: str | None,
    depth: int | None,
    sweep: str | None,
    branch: str | None,
    nmax: int | None,
    output: str | None,
    budget: int | None,
) -> None:
    """Verify a descending dimension chain along a parameter sweep."""

    def action() -> bool:
        cfg = _settings(
            config_path,
            kind=kind,
            depth=depth,
            sweep=parse_sweep(sweep) if sweep is not None else None,
            nmax=nmax,
            output=output,
            budget=budget,
        )
        c = build_chain(
            ChainKind(_require(cfg.kind, "kind")),
            _require(cfg.depth, "depth"),
            cfg.sweep,
            parse_digits(branch) if branch else None,
        )
        report = verify_chain(c, cfg.nmax, cfg.budget)
        rows = report.csv_rows()
        click.echo(render_summary("chain", report=report, rows=rows))
        result = {
            "kind": c.kind.value,
            "depth": c.depth,
            "sweep": [list(p) for p in c.sweep],
            "counterexamples": report.counterexamples,
        }
        write_report(cfg.output, "chain", report.passed, result, rows)
        return report.passed

    _guarded(action, "verify chain")


@main.command()
@config_option
@click.option("--formula", default=None, help="Successor formula, or a pair equivalence formula.")
@click.option(
    "--from-pair",
    is_flag=True,
    default=False,
    help="Read an equivalence formula of the pair signature and translate it first.",
)
@check_model_option
@output_option
@budget_option
def star(
    config_path: str | None,
    formula: str | None,
    from_pair: bool,
    check_models: tuple[str, ...],
    output: str | None,
    budget: int | None,
) -> None:
    """Eliminate quantifiers in the successor theory of the class quotient."""

    def action() -> bool:
        cfg = _settings(
            config_path,
            formula=formula,
            check_models=list(check_models) or None,
            output=output,
            budget=budget,
        )
        text = _require(cfg.formula, "formula")
        if from_pair:
            source = translate_to_star(parse_formula(text, Signature.PAIR))
        else:
            source = parse_formula(text, Signature.STAR)
        result = qe_star(source, cfg.dnf_cap)
        variants = {"result": to_sexpr(result)}
        if from_pair:
            variants["pulled_back"] = to_sexpr(pull_back(result))
        checks = _check_equivalence(
            source, result, cfg.check_models or DEFAULT_QE_CHECKS[Theory.STAR], cfg.budget
        )
        passed = all(c["agree"] for c in checks)
        click.echo(render_summary("qe", variants=variants, checks=checks, passed=passed))
        write_report(cfg.output, "star", passed, {"formula": to_sexpr(source), **variants}, checks)
        return passed

    _guarded(action, "eliminate successor quantifiers")


@main.command()
@config_option
@click.option(
    "--suite",
    "suites",
    type=click.Choice([s.value for s in Suite] + ["all"]),
    multiple=True,
    help="Suite to run (default: all). May be repeated.",
)
@click.option("--seed", type=int, default=None, help="Corpus seed.")
@click.option("--size", type=int, default=None, help="Inputs per suite.")
@click.option(
    "--max-assignments",
    type=int,
    default=None,
    help=(
        "Parameter tuples per model above which a seeded sample is checked "
        f"(default: {SUITE_MAX_ASSIGNMENTS[Suite.TREE]} for tree, "
        f"{DEFAULT_MAX_ASSIGNMENTS} otherwise)."
    ),
)
@check_model_option
@output_option
@budget_option
def corpus(
    config_path: str | None,
    suites: tuple[str, ...],
    seed: int | None,
    size: int | None,
    max_assignments: int | None,
    check_models: tuple[str, ...],
    output: str | None,
    budget: int | None,
) -> None:
    """Run the seeded random soundness suites against brute force."""

    def action() -> bool:
        cfg = _settings(
            config_path,
            seed=seed,
            size=size,
            check_models=list(check_models) or None,
            output=output,
            budget=budget,
        )
        chosen = [Suite(s) for s in suites if s != "all"]
        if not chosen or "all" in suites:
            chosen = list(Suite)
        if cfg.check_models and len(chosen) > 1:
            raise ValueError("--check-model needs a single --suite")
        checks = []
        for suite in chosen:
            checks.extend(
                run_suite(
                    suite,
                    cfg.seed,
                    cfg.size,
                    cfg.check_models or None,
                    max_assignments,
                    cfg.dnf_cap,
                    cfg.budget,
                )
            )
        passed = all(c.passed for c in checks)
        totals = {
            suite.value: {
                "checks": sum(1 for c in checks if c.suite is suite),
                "failures": sum(1 for c in checks if c.suite is suite and not c.passed),
            }
            for suite in chosen
        }
        failing = [c.csv_row() for c in checks if not c.passed]
        click.echo(render_summary("corpus", seed=cfg.seed, totals=totals, failing=failing))
        write_report(
            cfg.output,
            "corpus",
            passed,
            {"seed": cfg.seed, "size": cfg.size, "totals": totals},
            [c.csv_row() for c in checks],
        )
        return passed

    _guarded(action, "run corpus")


if __name__ == "__main__":
    main()
