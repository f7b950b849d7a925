"""Experiment plans: sweep expansion, per-run scenarios and the run index."""

import itertools
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import yaml
from pydantic import ValidationError

from ..core.config import CHEEGER_MAX_N, DEFAULT_CP, MIN_EN_TRIALS, get_workers
from ..core.errors import ConfigurationError, DiagnosticRefusal
from ..core.models import ExperimentPlan, RunRecord, SignedGraph, SweepSummary, SystemConfig, Trajectory
from ..diagnostics import (
    basin_radius_truncated,
    distributional_frequencies,
    fit_decay_rate,
    frequency_sync_check,
    order_parameter,
    splitting_check,
    sync_report,
    theorem_rate_bound,
)
from ..graph import balance_partition, cheeger_bounds, connected_components, degree_vector, spectrum
from ..integrator import integrate, trajectory_to_frame, write_trajectory_csv
from ..model import initial_phases, system_config_from_mapping, validate_hypotheses
from ..model.config_io import KNOWN_KEYS, flatten_mapping
from ..noise import kolmogorov_check, sample_driver
from ..roughpath import estimate_EN
from . import plots

logger = logging.getLogger(__name__)

FREQ_STREAM = 104729

PRESETS: Dict[str, Dict[str, List[Any]]] = {
    "sigmaBracket": {"sigma": [0.05, 0.1, 0.5, 2.0, 10.0]},
    "acceptanceSeeds": {"seed": list(range(20))},
}

# verdict that counts as success in a seed summary
SUCCESS_KEY = {
    "sync": "synchronized",
    "nonRotInv": "synchronized",
    "hyperplane": "mean_phase_conserved",
    "splitting": "splitting",
    "frequencies": "frequency_sync",
    "rateBound": "positive",
    "fbmTest": "kolmogorov",
    "graphInfo": "connected",
}

_PLAN_KEYS = {
    "scenario": "scenario",
    "scheme": "scheme",
    "output": "output_dir",
    "format": "output_format",
    "withFrequencies": "with_frequencies",
    "initFreqSpread": "init_freq_spread",
}


# ---------------------------------------------------------------------------
# plans
# ---------------------------------------------------------------------------


def plan_from_mapping(data: Mapping[str, Any], base_dir: Union[str, Path, None] = None) -> ExperimentPlan:
    """Build a plan from a mapping with ``base``, ``scenario``, ``sweeps``, ``preset`` and ``init``.

    Raises:
        ConfigurationError: on unknown sweep keys, unknown presets or invalid values
    """
    if "base" not in data or not isinstance(data["base"], Mapping):
        raise ConfigurationError("plan needs a 'base' configuration mapping")
    sweeps: Dict[str, List[Any]] = {}
    preset = data.get("preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigurationError(f"unknown sweep preset '{preset}', expected one of {sorted(PRESETS)}")
        sweeps.update({k: list(v) for k, v in PRESETS[preset].items()})
    for key, values in (data.get("sweeps") or {}).items():
        if key not in KNOWN_KEYS:
            raise ConfigurationError(f"sweep '{key}' is not a configuration key")
        sweeps[key] = list(values) if isinstance(values, (list, tuple)) else [values]

    fields: Dict[str, Any] = {"base": dict(data["base"]), "sweeps": sweeps}
    for key, field in _PLAN_KEYS.items():
        if key in data:
            fields[field] = data[key]
    init = data.get("init") or {}
    if "spread" in init:
        fields["init_spread"] = init["spread"]
    if "explicit" in init:
        fields["init_explicit"] = [float(x) for x in init["explicit"]]
    if base_dir is not None:
        fields["base_dir"] = str(base_dir)
    try:
        return ExperimentPlan(**fields)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid experiment plan: {e}")


def load_plan(path: Union[str, Path]) -> ExperimentPlan:
    p = Path(path)
    try:
        with p.open("r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigurationError(f"Cannot read plan {p}: {e}")
    if not isinstance(data, Mapping):
        raise ConfigurationError(f"{p}: expected key-value pairs at the top level")
    return plan_from_mapping(data, base_dir=p.parent)


def sweep_points(plan: ExperimentPlan) -> List[Dict[str, Any]]:
    """Cartesian product of the sweeps in sorted key order; one empty point without sweeps."""
    keys = sorted(plan.sweeps)
    if not keys:
        return [{}]
    return [dict(zip(keys, combo)) for combo in itertools.product(*(plan.sweeps[k] for k in keys))]


def point_config(plan: ExperimentPlan, params: Mapping[str, Any]) -> SystemConfig:
    data = flatten_mapping(plan.base)
    data.update(params)
    if plan.scenario == "nonRotInv":
        data.setdefault("noiseKind", "diagonalSine")
    return system_config_from_mapping(data, base_dir=plan.base_dir)


# ---------------------------------------------------------------------------
# artifacts
# ---------------------------------------------------------------------------


def _clean(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.generic):
        return _clean(value.item())
    return value


def dumps_json(data: Any) -> str:
    """Sorted, indented JSON with full float precision; non-finite floats become null."""
    return json.dumps(_clean(data), sort_keys=True, indent=2) + "\n"


def write_json(data: Any, path: Union[str, Path]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(dumps_json(data), encoding="utf-8")
    return p


def _write_trajectory(traj: Trajectory, folder: Path, fmt: str) -> Path:
    if fmt == "json":
        frame = trajectory_to_frame(traj)
        return write_json({c: frame[c].tolist() for c in frame.columns}, folder / "trajectory.json")
    return write_trajectory_csv(traj, folder / "trajectory.csv")


def graph_report(g: SignedGraph) -> Dict[str, Any]:
    """Spectrum, components, balance and (for small connected nonnegative graphs) Cheeger bounds."""
    spec = spectrum(g)
    partition = balance_partition(g)
    report: Dict[str, Any] = {
        "name": g.name,
        "n": g.n,
        "nonnegative": g.is_nonnegative,
        "degrees": degree_vector(g).tolist(),
        "spectrum": spec.model_dump(),
        "components": connected_components(g),
        "balanced": partition is not None,
        "partition": list(partition.side) if partition is not None else None,
    }
    if g.is_nonnegative and spec.component_count == 1 and g.n <= CHEEGER_MAX_N:
        report["cheeger"] = cheeger_bounds(g).model_dump()
    return report


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

ScenarioResult = Tuple[Dict[str, Any], Dict[str, bool], Optional[float], Optional[float]]


def _initial_frequencies(cfg: SystemConfig, spread: float) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, FREQ_STREAM]))
    return cfg.natural_freqs + rng.uniform(-spread, spread, size=cfg.n)


def _simulate(plan: ExperimentPlan, cfg: SystemConfig, folder: Path, artifacts: List[str]) -> ScenarioResult:
    driver = sample_driver(cfg.fbm)
    theta0 = initial_phases(cfg.n, plan.init_spread, cfg.seed, plan.init_explicit)
    with_freq = plan.with_frequencies or plan.scenario == "frequencies"
    varpi0 = _initial_frequencies(cfg, plan.init_freq_spread) if with_freq else None
    traj = integrate(cfg, driver, theta0, plan.scheme, with_frequencies=with_freq, varpi0=varpi0)
    artifacts.append(_write_trajectory(traj, folder, plan.output_format).name)

    report = sync_report(traj, driver, cfg)
    payload: Dict[str, Any] = {"sync": report.model_dump()}
    verdicts = dict(report.verdicts)

    if plan.scenario == "splitting":
        partition = balance_partition(cfg.graph)
        if partition is None:
            raise ConfigurationError("splitting scenario needs a balanced coupling graph")
        split = splitting_check(traj, partition)
        payload["splitting"] = split.model_dump()
        verdicts["splitting"] = split.verdict

    if with_freq:
        freq = frequency_sync_check(traj, cfg)
        payload["frequencies"] = freq.model_dump()
        verdicts["frequency_sync"] = freq.verdict
        smoothed = distributional_frequencies(traj)
        payload["mean_frequency"] = {
            "raw_start": float(smoothed.mean_raw[0]),
            "raw_end": float(smoothed.mean_raw[-1]),
        }
        artifacts.append(plots.write_svg(plots.frequency_panels(smoothed, traj), folder / "frequencies.svg").name)

    try:
        fit = fit_decay_rate(traj)
    except DiagnosticRefusal:
        fit = None
    artifacts.append(plots.write_svg(plots.phase_traces(traj), folder / "phases.svg").name)
    artifacts.append(plots.write_svg(plots.order_parameter_chart(traj.times, order_parameter(traj)), folder / "order.svg").name)
    artifacts.append(plots.write_svg(plots.decay_chart(traj, fit), folder / "decay.svg").name)
    if plan.scenario == "hyperplane":
        artifacts.append(plots.write_svg(plots.hyperplane_projections(traj), folder / "hyperplane.svg").name)
    return payload, verdicts, report.fitted_rate, report.terminal_deviation


def _rate_bound(plan: ExperimentPlan, cfg: SystemConfig, folder: Path, artifacts: List[str]) -> ScenarioResult:
    en = estimate_EN(cfg.fbm, 1.0 / (16.0 * DEFAULT_CP), trials=MIN_EN_TRIALS)
    bound = theorem_rate_bound(cfg, en.mean)
    hyp = validate_hypotheses(cfg, en.mean)
    payload: Dict[str, Any] = {"count_estimate": en.model_dump(), "rate_bound": bound.model_dump(), "hypotheses": hyp.model_dump()}
    n_max = int(math.floor(cfg.horizon + 1e-9))
    if n_max >= 1:
        try:
            basin = basin_radius_truncated(cfg, sample_driver(cfg.fbm), cfg.delta / 2, n_max, 0.5, c_g=bound.c_g)
            payload["basin"] = basin.model_dump()
        except DiagnosticRefusal as e:
            payload["basin"] = {"refused": str(e)}
    return payload, {"positive": bound.positive}, None, None


def _fbm_test(plan: ExperimentPlan, cfg: SystemConfig, folder: Path, artifacts: List[str]) -> ScenarioResult:
    report = kolmogorov_check(cfg.fbm)
    return {"kolmogorov": report.model_dump()}, {"kolmogorov": report.passed}, None, None


def _graph_info(plan: ExperimentPlan, cfg: SystemConfig, folder: Path, artifacts: List[str]) -> ScenarioResult:
    report = graph_report(cfg.graph)
    return {"graph": report}, {"connected": report["spectrum"]["component_count"] == 1}, None, None


_SCENARIOS: Dict[str, Callable[[ExperimentPlan, SystemConfig, Path, List[str]], ScenarioResult]] = {
    "sync": _simulate,
    "splitting": _simulate,
    "nonRotInv": _simulate,
    "frequencies": _simulate,
    "hyperplane": _simulate,
    "rateBound": _rate_bound,
    "fbmTest": _fbm_test,
    "graphInfo": _graph_info,
}


def run_id(index: int) -> str:
    return f"run-{index:03d}"


def execute_run(plan: ExperimentPlan, index: int, params: Dict[str, Any]) -> RunRecord:
    """Run one sweep point; failures are recorded, never raised."""
    rid = run_id(index)
    folder = Path(plan.output_dir) / rid
    artifacts: List[str] = []
    try:
        cfg = point_config(plan, params)
        folder.mkdir(parents=True, exist_ok=True)
        payload, verdicts, rate, deviation = _SCENARIOS[plan.scenario](plan, cfg, folder, artifacts)
        payload["params"] = params
        payload["scenario"] = plan.scenario
        artifacts.append(write_json(payload, folder / "report.json").name)
        logger.info("%s %s ok %s", rid, params, verdicts)
        return RunRecord(
            run_id=rid,
            params=params,
            status="ok",
            artifacts=sorted(artifacts),
            verdicts=verdicts,
            fitted_rate=rate,
            terminal_deviation=deviation,
        )
    except Exception as e:
        logger.error("%s %s failed: %s", rid, params, e)
        return RunRecord(run_id=rid, params=params, status="failed", error=f"{type(e).__name__}: {e}", artifacts=sorted(artifacts))


def _execute_star(args: Tuple[ExperimentPlan, int, Dict[str, Any]]) -> RunRecord:
    return execute_run(*args)


def run(
    plan: ExperimentPlan,
    workers: Optional[int] = None,
    progress: Optional[Callable[[RunRecord], None]] = None,
) -> List[RunRecord]:
    """Execute every sweep point and write ``index.json`` (and ``summary.json`` for seed sweeps).

    Runs go to a process pool when more than one worker is configured; the
    index is written once by the caller process in sweep order.
    """
    points = sweep_points(plan)
    jobs = [(plan, i, p) for i, p in enumerate(points)]
    count = workers if workers is not None else get_workers()
    out = Path(plan.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    logger.info("Running %d point(s) of scenario %s with %d worker(s)", len(jobs), plan.scenario, count)

    records: List[RunRecord] = []
    if count > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=count) as pool:
            for record in pool.map(_execute_star, jobs):
                records.append(record)
                if progress:
                    progress(record)
    else:
        for job in jobs:
            record = _execute_star(job)
            records.append(record)
            if progress:
                progress(record)

    write_json({"scenario": plan.scenario, "runs": [r.model_dump() for r in records]}, out / "index.json")
    if "seed" in plan.sweeps:
        write_json(seed_sweep_summary(plan, records).model_dump(), out / "summary.json")
    return records


def _iqr(values: Sequence[float]) -> Optional[Tuple[float, float]]:
    if not values:
        return None
    lo, hi = np.percentile(np.asarray(values, dtype=np.float64), [25, 75])
    return float(lo), float(hi)


def seed_sweep_summary(plan: ExperimentPlan, records: Optional[Sequence[RunRecord]] = None) -> SweepSummary:
    """Success fraction, median fitted rate and interquartile ranges over a seed sweep.

    Runs the plan when no records are given.

    Raises:
        ConfigurationError: when the plan does not sweep over seeds
    """
    if "seed" not in plan.sweeps:
        raise ConfigurationError("seed summary needs a sweep over 'seed'")
    if records is None:
        records = run(plan)
    key = SUCCESS_KEY[plan.scenario]
    ok = [r for r in records if r.status == "ok"]
    successes = sum(1 for r in ok if r.verdicts.get(key, False))
    rates = [r.fitted_rate for r in ok if r.fitted_rate is not None]
    deviations = [r.terminal_deviation for r in ok if r.terminal_deviation is not None]
    return SweepSummary(
        runs=len(records),
        succeeded=len(ok),
        failed=len(records) - len(ok),
        synchronized=successes,
        success_fraction=successes / len(records) if records else 0.0,
        median_rate=float(np.median(rates)) if rates else None,
        rate_iqr=_iqr(rates),
        median_deviation=float(np.median(deviations)) if deviations else None,
        deviation_iqr=_iqr(deviations),
    )
