"""Synchronisation measurements on simulated trajectories."""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..core.config import DEFAULT_TAIL_FRACTION, SMOOTHING_WINDOWS, SYNC_TOLERANCE
from ..core.errors import DiagnosticRefusal
from ..core.models import (
    BalancePartition,
    FrequencySyncReport,
    OrderParameter,
    RoughDriver,
    SmoothedFrequencies,
    SplittingReport,
    SyncReport,
    SystemConfig,
    ThetaInfinityReport,
    Trajectory,
)
from ..integrator.schemes import PhaseField
from ..model.hypotheses import coupling_lambda2
from ..model.switching import switching_transform
from ..roughpath.integral import integral_terms, rough_integral
from .decay import fit_decay_rate, fit_log_decay

logger = logging.getLogger(__name__)

FIRST_INTEGRAL_ATOL = 1e-8
RATE_FLOOR_FACTOR = 0.9


def _config(traj: Trajectory, cfg: Optional[SystemConfig]) -> SystemConfig:
    found = cfg or traj.config
    if found is None:
        raise DiagnosticRefusal("trajectory carries no configuration; pass one explicitly")
    return found


def _wrap(x: np.ndarray) -> np.ndarray:
    return np.angle(np.exp(1j * np.asarray(x)))


def phase_spread(traj: Trajectory) -> np.ndarray:
    """max_{i,j} |theta_i - theta_j| at every grid time."""
    return np.ptp(traj.theta, axis=1)


def hyperplane_residual(traj: Trajectory) -> float:
    """max_t |Theta(t) - Theta(0)| of the mean phase."""
    return float(np.max(np.abs(traj.mean_phase - traj.mean_phase[0])))


def mean_noise_integrand(traj: Trajectory, cfg: SystemConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Row mean Y of the noise along the run and its Gubinelli derivative.

    Y[k, j] = (1/N) sum_i G_ij(theta_k) and
    Y'[k, j, l] = (1/N) sum_{i,n} dG_ij/dtheta_n G_nl, the chain used by the
    second order step.
    """
    field = PhaseField(cfg, reduced=traj.reduced)
    points = traj.theta.shape[0]
    m = cfg.driver_dim
    y = np.empty((points, m))
    yp = np.empty((points, m, m))
    for k, theta in enumerate(traj.theta):
        g = field.noise(theta)
        dg = field.jacobian(theta)
        y[k] = g.mean(axis=0)
        yp[k] = np.einsum("ijn,nl->jl", dg, g) / cfg.n
    return y, yp


def theta_infinity(traj: Trajectory, driver: RoughDriver, cfg: Optional[SystemConfig] = None) -> ThetaInfinityReport:
    """Limit mean phase Theta(0) + int_0^T Y dW in the frame rotating with the mean frequency.

    The increments are the integrals over consecutive unit intervals; they
    are empty when the grid has no point at integer times.

    Raises:
        DiagnosticRefusal: when trajectory and driver grids differ
    """
    cfg = _config(traj, cfg)
    if traj.theta.shape[0] != driver.steps + 1:
        raise DiagnosticRefusal(f"trajectory has {traj.theta.shape[0]} points, driver {driver.steps + 1}")
    y, yp = mean_noise_integrand(traj, cfg)
    theta0 = float(traj.mean_phase[0])
    estimate = theta0 + rough_integral(y, yp, driver)

    increments: List[float] = []
    per_unit = int(round(1.0 / driver.dt))
    if per_unit >= 1 and abs(per_unit * driver.dt - 1.0) < 1e-9:
        terms = integral_terms(y, yp, driver)
        for k in range(driver.steps // per_unit):
            increments.append(float(terms[k * per_unit : (k + 1) * per_unit].sum()))

    drift = 0.0 if traj.reduced else float(np.mean(cfg.natural_freqs))
    terminal = float(traj.mean_phase[-1]) - drift * float(traj.times[-1] - traj.times[0])
    return ThetaInfinityReport(estimate=estimate, theta0=theta0, terminal_mean=terminal, increments=increments)


def splitting_check(
    traj: Trajectory, partition: BalancePartition, tolerance: float = SYNC_TOLERANCE
) -> SplittingReport:
    """Coherence of the switched terminal phases modulo 2 pi."""
    phi = switching_transform(traj.theta[-1], partition)
    center = np.angle(np.exp(1j * phi).mean())
    dev = np.abs(_wrap(phi - center))
    side = np.asarray(partition.side)
    sides: Dict[str, float] = {}
    for label in (1, 2):
        mask = side == label
        sides[f"side{label}"] = float(dev[mask].max()) if mask.any() else 0.0
    worst = float(dev.max())
    return SplittingReport(verdict=worst < tolerance, max_deviation=worst, side_deviations=sides, tolerance=tolerance)


def frequency_sync_check(
    traj: Trajectory,
    cfg: Optional[SystemConfig] = None,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
    tolerance: float = SYNC_TOLERANCE,
) -> FrequencySyncReport:
    """Spread condition Delta < pi/2 and decay of the mean-reduced frequencies.

    The rate floor K cos(Delta) lambda_2 / N is only reported while the
    spread condition holds; the verdict asks for a fitted rate of at least
    0.9 times the floor, or frequencies already equal to the fit floor.

    Raises:
        DiagnosticRefusal: for a trajectory without frequencies
    """
    if traj.varpi is None:
        raise DiagnosticRefusal("trajectory was integrated without the frequency system")
    cfg = _config(traj, cfg)
    delta_max = float(phase_spread(traj).max())
    holds = delta_max < math.pi / 2

    varpi_hat = traj.varpi - traj.varpi.mean(axis=1, keepdims=True)
    spread = float(np.ptp(traj.varpi[-1]))
    rate = r2 = None
    try:
        fit = fit_log_decay(traj.times, np.linalg.norm(varpi_hat, axis=1), tail_fraction)
        rate, r2 = fit.rate, fit.r_squared
    except DiagnosticRefusal as e:
        logger.debug("frequency decay not fitted: %s", e)

    floor = None
    verdict = False
    if holds:
        lam2, _ = coupling_lambda2(cfg)
        floor = cfg.K * math.cos(delta_max) * lam2 / cfg.n
        verdict = spread < tolerance if rate is None else rate >= RATE_FLOOR_FACTOR * floor
    return FrequencySyncReport(
        delta_max=delta_max,
        hypothesis_holds=holds,
        fitted_rate=rate,
        r_squared=r2,
        rate_floor=floor,
        terminal_spread=spread,
        verdict=verdict,
    )


def distributional_frequencies(traj: Trajectory, windows: Sequence[float] = SMOOTHING_WINDOWS) -> SmoothedFrequencies:
    """Finite difference frequencies and their moving averages over each window.

    Raises:
        DiagnosticRefusal: for a window shorter than the time step
    """
    steps = np.diff(traj.times)
    dt = float(steps[0])
    raw = np.diff(traj.theta, axis=0) / steps[:, None]
    frame = pd.DataFrame(raw)
    smoothed: Dict[float, np.ndarray] = {}
    mean_smoothed: Dict[float, np.ndarray] = {}
    for w in windows:
        if w < dt * (1.0 - 1e-9):
            raise DiagnosticRefusal(f"smoothing window {w} is shorter than the time step {dt}")
        span = max(1, int(round(w / dt)))
        values = frame.rolling(span, min_periods=1).mean().to_numpy()
        smoothed[float(w)] = values
        mean_smoothed[float(w)] = values.mean(axis=1)
    return SmoothedFrequencies(
        times=traj.times[1:],
        raw=raw,
        smoothed=smoothed,
        mean_raw=raw.mean(axis=1),
        mean_smoothed=mean_smoothed,
    )


def order_parameter(traj: Trajectory) -> OrderParameter:
    z = np.exp(1j * traj.theta).mean(axis=1)
    return OrderParameter(r=np.minimum(np.abs(z), 1.0), psi=np.angle(z))


def sync_report(
    traj: Trajectory,
    driver: Optional[RoughDriver] = None,
    cfg: Optional[SystemConfig] = None,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
    tolerance: float = SYNC_TOLERANCE,
) -> SyncReport:
    """Decay fit, terminal deviation, mean phase conservation, Theta_inf and Delta.

    Theta_inf is only estimated when the driver is given. A run whose norm
    falls under the fit floor before the tail counts as decaying when the
    terminal deviation is small.
    """
    notes: List[str] = []
    rate = r2 = None
    window = (float(traj.times[0]), float(traj.times[-1]))
    try:
        fit = fit_decay_rate(traj, tail_fraction)
        rate, r2, window = fit.rate, fit.r_squared, fit.window
    except DiagnosticRefusal as e:
        notes.append(f"decay rate not fitted: {e}")

    deviation = float(np.max(np.abs(traj.theta[-1] - traj.mean_phase[-1])))
    residual = hyperplane_residual(traj)
    delta_sup = float(phase_spread(traj).max())

    theta_inf = None
    if driver is not None:
        theta_inf = theta_infinity(traj, driver, cfg).estimate

    verdicts = {
        "synchronized": deviation < tolerance and (rate is None or rate > 0),
        "decaying": rate is not None and rate > 0,
        "mean_phase_conserved": residual <= FIRST_INTEGRAL_ATOL,
        "delta_below_half_pi": delta_sup < math.pi / 2,
    }
    return SyncReport(
        fitted_rate=rate,
        r_squared=r2,
        tail_window=window,
        terminal_deviation=deviation,
        conservation_residual=residual,
        theta_infinity=theta_inf,
        delta_sup=delta_sup,
        verdicts=verdicts,
        notes=notes,
    )
