"""Trajectory integration, self-convergence and trajectory CSV files."""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy import stats

from ..core.config import BLOWUP_GUARD
from ..core.errors import IntegrationAborted, RoughPathParameterError
from ..core.models import ConvergenceReport, RoughDriver, Scheme, SystemConfig, Trajectory
from ..model.config_io import initial_phases
from ..model.vector_fields import check_diagonal_regime
from ..noise.lift import restrict, sample_driver
from .schemes import FrequencyField, PhaseField, VectorField, advance

logger = logging.getLogger(__name__)


def _check_grid(cfg: SystemConfig, driver: RoughDriver) -> None:
    if driver.steps != cfg.steps or abs(driver.dt - cfg.dt) > 1e-12 * cfg.dt:
        raise RoughPathParameterError(
            f"driver grid (dt={driver.dt}, steps={driver.steps}) does not match "
            f"configuration (dt={cfg.dt}, steps={cfg.steps})"
        )
    if driver.m != cfg.driver_dim:
        raise RoughPathParameterError(f"driver has {driver.m} components, configuration needs {cfg.driver_dim}")


def _guard(state: np.ndarray, k: int, label: str) -> None:
    if not np.all(np.isfinite(state)) or np.max(np.abs(state)) > BLOWUP_GUARD:
        raise IntegrationAborted(f"{label} left the finite range at step {k + 1}", last_valid_index=k)


def integrate(
    cfg: SystemConfig,
    driver: RoughDriver,
    theta0: Sequence[float],
    scheme: Scheme = "davie",
    with_frequencies: bool = False,
    varpi0: Optional[Sequence[float]] = None,
    reduced: bool = False,
) -> Trajectory:
    """Integrate the phase system (and optionally the frequency system).

    Args:
        cfg: system configuration; its grid must match the driver
        driver: rough driver on the configuration grid
        theta0: initial phases, length N
        scheme: "davie" or "heun"
        with_frequencies: also step the frequency system, coupled to the
            phases of the same grid index
        varpi0: initial frequencies, default the natural frequencies
        reduced: integrate the zero-mean system with centred noise; theta0
            is centred first

    Raises:
        IntegrationAborted: when a state becomes non-finite or exceeds the guard
        RoughPathParameterError: when the driver grid does not match
    """
    _check_grid(cfg, driver)
    theta = np.asarray(theta0, dtype=np.float64).copy()
    if theta.shape != (cfg.n,):
        raise RoughPathParameterError(f"initial phases have shape {theta.shape}, expected ({cfg.n},)")
    if reduced:
        theta = theta - theta.mean()
    if cfg.noise_kind == "diagonalSine":
        check_diagonal_regime(cfg)

    steps = driver.steps
    thetas = np.empty((steps + 1, cfg.n))
    thetas[0] = theta
    phase_field = PhaseField(cfg, reduced=reduced)

    varpis = None
    freq_field = None
    if with_frequencies:
        varpi = np.asarray(cfg.natural_freqs if varpi0 is None else varpi0, dtype=np.float64).copy()
        if varpi.shape != (cfg.n,):
            raise RoughPathParameterError(f"initial frequencies have shape {varpi.shape}, expected ({cfg.n},)")
        varpis = np.empty((steps + 1, cfg.n))
        varpis[0] = varpi
        freq_field = FrequencyField(cfg)

    for k in range(steps):
        if freq_field is not None:
            freq_field.theta = thetas[k]
            varpis[k + 1] = advance(varpis[k], freq_field, driver, k, scheme)
            _guard(varpis[k + 1], k, "frequency state")
        thetas[k + 1] = advance(thetas[k], phase_field, driver, k, scheme)
        _guard(thetas[k + 1], k, "phase state")

    logger.debug("Integrated %d steps with %s (N=%d, sigma=%s)", steps, scheme, cfg.n, cfg.sigma)
    return Trajectory(
        times=driver.times,
        theta=thetas,
        mean_phase=thetas.mean(axis=1),
        varpi=varpis,
        scheme=scheme,
        config=cfg,
        reduced=reduced,
    )


def integrate_field(field: VectorField, y0: Sequence[float], driver: RoughDriver, scheme: Scheme = "davie") -> np.ndarray:
    """Terminal state of a generic field; used for convergence studies."""
    y = np.asarray(y0, dtype=np.float64).copy()
    for k in range(driver.steps):
        y = advance(y, field, driver, k, scheme)
        _guard(y, k, "state")
    return y


def convergence_order(dts: Sequence[float], errors: Sequence[float]) -> Optional[float]:
    """Slope of log2(error) against log2(dt); None when any error is zero."""
    err = np.asarray(errors, dtype=np.float64)
    if err.size < 2 or np.any(err <= 0):
        return None
    return float(stats.linregress(np.log2(np.asarray(dts)), np.log2(err)).slope)


def self_convergence_field(
    field: VectorField,
    y0: Sequence[float],
    driver: RoughDriver,
    scheme: Scheme = "davie",
    refinements: int = 4,
    exact: Optional[np.ndarray] = None,
) -> ConvergenceReport:
    """Errors of the terminal state on coarsened copies of one fine driver.

    Level l uses the driver restricted by 2^l (second level aggregated with
    Chen's relation). Errors are measured against ``exact`` when given,
    otherwise against the solution on the finest grid.
    """
    if refinements < 3:
        raise RoughPathParameterError(f"need at least 3 refinement levels, got {refinements}")
    if driver.steps % (2**refinements):
        raise RoughPathParameterError(f"{driver.steps} steps cannot be halved {refinements} times")

    reference = exact if exact is not None else integrate_field(field, y0, driver, scheme)
    first = 0 if exact is not None else 1
    dts: List[float] = []
    errors: List[float] = []
    for level in range(first, refinements + first):
        coarse = restrict(driver, 2**level)
        y = integrate_field(field, y0, coarse, scheme)
        dts.append(coarse.dt)
        errors.append(float(np.linalg.norm(np.atleast_1d(y - reference))))

    return ConvergenceReport(
        scheme=scheme,
        dts=dts,
        errors=errors,
        order=convergence_order(dts, errors),
        reference="exact" if exact is not None else "finest",
    )


def self_convergence(
    cfg: SystemConfig,
    scheme: Scheme = "davie",
    refinements: int = 4,
    theta0: Optional[Sequence[float]] = None,
    driver: Optional[RoughDriver] = None,
) -> ConvergenceReport:
    """Empirical order of ``scheme`` for the phase system of ``cfg``.

    The driver on the configuration grid is the finest level; the initial
    phases default to a uniform draw on [0, 0.9 pi].
    """
    fine = sample_driver(cfg.fbm) if driver is None else driver
    _check_grid(cfg, fine)
    start = initial_phases(cfg.n, 0.9, cfg.seed) if theta0 is None else np.asarray(theta0, dtype=np.float64)
    return self_convergence_field(PhaseField(cfg), start, fine, scheme, refinements)


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------


def trajectory_to_frame(traj: Trajectory) -> pd.DataFrame:
    """Columns t, theta_0..theta_{N-1} and, when present, varpi_0..varpi_{N-1}."""
    data = {"t": traj.times}
    for i in range(traj.n):
        data[f"theta_{i}"] = traj.theta[:, i]
    if traj.varpi is not None:
        for i in range(traj.n):
            data[f"varpi_{i}"] = traj.varpi[:, i]
    return pd.DataFrame(data)


def write_trajectory_csv(traj: Trajectory, path: Union[str, Path]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    trajectory_to_frame(traj).to_csv(p, index=False, float_format="%.17g", lineterminator="\n")
    return p


def read_trajectory_csv(path: Union[str, Path], scheme: Scheme = "davie") -> Trajectory:
    """Load a trajectory written by :func:`write_trajectory_csv`."""
    df = pd.read_csv(Path(path), float_precision="round_trip")
    theta_cols = [c for c in df.columns if c.startswith("theta_")]
    varpi_cols = [c for c in df.columns if c.startswith("varpi_")]
    if "t" not in df.columns or not theta_cols:
        raise RoughPathParameterError(f"{path}: missing t or theta columns")
    theta = df[theta_cols].to_numpy()
    return Trajectory(
        times=df["t"].to_numpy(),
        theta=theta,
        mean_phase=theta.mean(axis=1),
        varpi=df[varpi_cols].to_numpy() if varpi_cols else None,
        scheme=scheme,
    )
