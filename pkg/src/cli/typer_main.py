"""Typer-based CLI for rough Kuramoto experiments.

Usage:
    # Simulate one configuration
    python run.py simulate config.yaml --out runs/demo

    # Parameter or seed sweep from a plan
    python run.py sweep plan.yaml --workers 4

    # Theorem rate bound, graph analysis and driver statistics
    python run.py rate-bound config.yaml
    python run.py graph-info complete --n 10
    python run.py fbm-test fbm.yaml
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional

import typer
import yaml
from pydantic import ValidationError
from typing_extensions import Annotated

from ..core.config import DEFAULT_CP, MIN_EN_TRIALS, OUTPUT_DIR
from ..core.errors import ConfigurationError, RoughKuramotoError
from ..core.models import ExperimentPlan, FbmSpec
from ..diagnostics import theorem_rate_bound
from ..graph import from_kind, load_edge_list
from ..model import load_system_config, validate_hypotheses
from ..model.config_io import flatten_mapping
from ..noise import kolmogorov_check
from ..roughpath import estimate_EN
from .runner import dumps_json, graph_report, load_plan, plan_from_mapping, run

app = typer.Typer(
    name="rough-kuramoto",
    help="Rough path Kuramoto synchronisation experiments",
    add_completion=False,
)

logger = logging.getLogger(__name__)


@app.callback()
def main(
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Enable verbose debug output")] = False,
):
    """Simulate, sweep and analyse Kuramoto oscillators driven by fractional noise."""
    if verbose:
        logging.basicConfig(level=logging.DEBUG, format="%(asctime)s %(levelname)s %(name)s: %(message)s", force=True)


def _read_mapping(path: Path) -> Dict[str, Any]:
    if not path.exists():
        typer.echo(f"Error: file not found: {path}", err=True)
        raise typer.Exit(1)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as e:
        typer.echo(f"Error: cannot parse {path}: {e}", err=True)
        raise typer.Exit(1)
    if not isinstance(data, dict):
        typer.echo(f"Error: {path} must hold key-value pairs", err=True)
        raise typer.Exit(1)
    return data


def _report_records(records, out: Path) -> None:
    failed = [r for r in records if r.status == "failed"]
    typer.echo(f"{len(records) - len(failed)} of {len(records)} run(s) succeeded; index at {out / 'index.json'}")
    for r in failed:
        typer.echo(f"  {r.run_id} {r.params}: {r.error}", err=True)
    if failed:
        raise typer.Exit(1)


@app.command()
def simulate(
    config: Annotated[Path, typer.Argument(help="System configuration (YAML)")],
    out: Annotated[Path, typer.Option("--out", "-o", help="Output directory")] = Path(OUTPUT_DIR),
    seed: Annotated[Optional[int], typer.Option("--seed", help="Override the configuration seed")] = None,
    scheme: Annotated[str, typer.Option("--scheme", help="davie or heun")] = "davie",
    fmt: Annotated[str, typer.Option("--format", help="Trajectory format: csv or json")] = "csv",
    scenario: Annotated[str, typer.Option("--scenario", help="sync, splitting, nonRotInv, frequencies or hyperplane")] = "sync",
    init_spread: Annotated[float, typer.Option("--init-spread", help="Initial phases uniform on [0, c*pi]")] = 0.9,
    freq_spread: Annotated[float, typer.Option("--freq-spread", help="Initial frequency spread for the frequency system")] = 0.0,
):
    """Integrate one configuration and write trajectory, report and plots."""
    base = flatten_mapping(_read_mapping(config))
    if seed is not None:
        base["seed"] = seed
    try:
        plan = plan_from_mapping(
            {
                "base": base,
                "scenario": scenario,
                "scheme": scheme,
                "format": fmt,
                "output": str(out),
                "init": {"spread": init_spread},
                "initFreqSpread": freq_spread,
            },
            base_dir=config.parent,
        )
    except ConfigurationError as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(1)
    records = run(plan, workers=1)
    _report_records(records, out)
    if records[0].status == "ok":
        typer.echo(dumps_json(records[0].verdicts), nl=False)


@app.command()
def sweep(
    plan_file: Annotated[Path, typer.Argument(help="Experiment plan (YAML)")],
    out: Annotated[Optional[Path], typer.Option("--out", "-o", help="Output directory (overrides the plan)")] = None,
    seed: Annotated[Optional[int], typer.Option("--seed", help="Fix the seed of every run")] = None,
    scheme: Annotated[Optional[str], typer.Option("--scheme", help="davie or heun (overrides the plan)")] = None,
    fmt: Annotated[Optional[str], typer.Option("--format", help="Trajectory format: csv or json")] = None,
    workers: Annotated[Optional[int], typer.Option("--workers", "-w", help="Worker processes (default RKM_WORKERS)")] = None,
):
    """Run every point of a parameter sweep and write the run index."""
    if not plan_file.exists():
        typer.echo(f"Error: plan not found: {plan_file}", err=True)
        raise typer.Exit(1)
    try:
        plan = load_plan(plan_file)
        updates: Dict[str, Any] = {}
        if out is not None:
            updates["output_dir"] = str(out)
        if scheme is not None:
            updates["scheme"] = scheme
        if fmt is not None:
            updates["output_format"] = fmt
        if seed is not None:
            updates["base"] = {**plan.base, "seed": seed}
            updates["sweeps"] = {k: v for k, v in plan.sweeps.items() if k != "seed"}
        plan = ExperimentPlan.model_validate({**plan.model_dump(), **updates})
    except (ConfigurationError, ValidationError) as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(1)

    target = Path(plan.output_dir)
    with typer.progressbar(length=_count_points(plan), label="Running sweep") as bar:
        records = run(plan, workers=workers, progress=lambda _record: bar.update(1))
    _report_records(records, target)


def _count_points(plan: ExperimentPlan) -> int:
    total = 1
    for values in plan.sweeps.values():
        total *= len(values)
    return total


@app.command("rate-bound")
def rate_bound(
    config: Annotated[Path, typer.Argument(help="System configuration (YAML)")],
    cp: Annotated[float, typer.Option("--cp", help="Constant C_p of the greedy threshold")] = DEFAULT_CP,
    trials: Annotated[int, typer.Option("--trials", help="Monte Carlo trials for E[N]")] = MIN_EN_TRIALS,
    seed: Annotated[Optional[int], typer.Option("--seed", help="Override the configuration seed")] = None,
    out: Annotated[Optional[Path], typer.Option("--out", "-o", help="Write the JSON report to this file")] = None,
):
    """Assemble the rate bound d - (2 + C_G) C_G - C_G E[N] with hypothesis flags."""
    try:
        cfg = load_system_config(config)
        if seed is not None:
            cfg = cfg.with_updates(seed=seed)
        en = estimate_EN(cfg.fbm, 1.0 / (16.0 * cp), trials=trials)
        report = theorem_rate_bound(cfg, en.mean, cp=cp)
        hyp = validate_hypotheses(cfg, en.mean)
    except RoughKuramotoError as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(1)
    text = dumps_json({"count_estimate": en.model_dump(), "rate_bound": report.model_dump(), "hypotheses": hyp.model_dump()})
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        typer.echo(f"Report written to {out}")
    else:
        typer.echo(text, nl=False)


@app.command("graph-info")
def graph_info(
    source: Annotated[str, typer.Argument(help="Edge list file or graph family such as complete or kNeighbor:2")],
    n: Annotated[Optional[int], typer.Option("--n", help="Number of vertices for a graph family")] = None,
):
    """Spectrum, components, balance and Cheeger bounds of a graph."""
    try:
        path = Path(source)
        if path.exists():
            g = load_edge_list(path, n)
        else:
            if n is None:
                typer.echo("Error: a graph family needs --n", err=True)
                raise typer.Exit(1)
            g = from_kind(source, n)
        report = graph_report(g)
    except (RoughKuramotoError, ValueError) as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(1)
    typer.echo(dumps_json(report), nl=False)


@app.command("fbm-test")
def fbm_test(
    spec_file: Annotated[Path, typer.Argument(help="Driver specification (YAML: hurst, dt, steps or T, m, seed)")],
    p: Annotated[float, typer.Option("--p", help="Moment order")] = 4.0,
    samples: Annotated[int, typer.Option("--samples", help="Number of sampled paths")] = 1000,
    seed: Annotated[Optional[int], typer.Option("--seed", help="Override the specification seed")] = None,
):
    """Kolmogorov moment scaling of sampled drivers over dyadic blocks."""
    data = _read_mapping(spec_file)
    if "T" in data and "steps" not in data:
        data["steps"] = int(round(float(data.pop("T")) / float(data["dt"])))
    if seed is not None:
        data["seed"] = seed
    try:
        spec = FbmSpec(**data)
        report = kolmogorov_check(spec, p=p, n_samples=samples)
    except (ValidationError, RoughKuramotoError, KeyError) as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(1)
    typer.echo(dumps_json(report.model_dump()), nl=False)
    if not report.passed:
        raise typer.Exit(1)


if __name__ == "__main__":
    app()
