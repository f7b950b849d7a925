"""Exponential decay rates fitted on the tail of a run."""

import logging
from typing import Optional

import numpy as np
from scipy import stats

from ..core.config import DECAY_FLOOR, DEFAULT_TAIL_FRACTION, MIN_FIT_POINTS
from ..core.errors import DiagnosticRefusal
from ..core.models import DecayFit, Trajectory

logger = logging.getLogger(__name__)


def fit_log_decay(
    times: np.ndarray,
    norms: np.ndarray,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
    floor: float = DECAY_FLOOR,
) -> DecayFit:
    """Least squares slope of -log(norm) against time on the last part of the run.

    Points whose norm is below ``floor`` are dropped.

    Raises:
        DiagnosticRefusal: for a tail fraction outside (0, 1] or fewer than
            MIN_FIT_POINTS usable points
    """
    if not 0.0 < tail_fraction <= 1.0:
        raise DiagnosticRefusal(f"tail fraction must lie in (0, 1], got {tail_fraction}")
    t = np.asarray(times, dtype=np.float64)
    y = np.asarray(norms, dtype=np.float64)
    t_lo = t[-1] - tail_fraction * (t[-1] - t[0])
    keep = (t >= t_lo - 1e-12 * max(1.0, abs(t_lo))) & (y >= floor) & np.isfinite(y)
    points = int(np.count_nonzero(keep))
    if points < MIN_FIT_POINTS:
        raise DiagnosticRefusal(f"only {points} usable points in [{t_lo:.6g}, {t[-1]:.6g}], need {MIN_FIT_POINTS}")

    fit = stats.linregress(t[keep], -np.log(y[keep]))
    rate = float(fit.slope)
    r2: Optional[float] = float(fit.rvalue**2) if np.isfinite(fit.rvalue) else None
    return DecayFit(
        rate=rate,
        intercept=float(-fit.intercept),
        r_squared=r2,
        window=(float(t_lo), float(t[-1])),
        points=points,
        decaying=rate > 0,
    )


def fit_decay_rate(traj: Trajectory, tail_fraction: float = DEFAULT_TAIL_FRACTION) -> DecayFit:
    """Decay rate of ||theta_hat(t)|| on the last ``tail_fraction`` of the run."""
    norms = np.linalg.norm(traj.theta_hat, axis=1)
    result = fit_log_decay(traj.times, norms, tail_fraction)
    logger.debug("fitted rate %.6g on %d points (R^2=%s)", result.rate, result.points, result.r_squared)
    return result
