"""Quantitative checks of synchronisation on simulated data."""

from .decay import fit_decay_rate, fit_log_decay
from .lyapunov import (
    basin_radius_from_counts,
    basin_radius_truncated,
    drift_jacobian,
    drift_lipschitz,
    lyapunov_check,
    theorem_rate_bound,
)
from .synchrony import (
    distributional_frequencies,
    frequency_sync_check,
    hyperplane_residual,
    order_parameter,
    phase_spread,
    splitting_check,
    sync_report,
    theta_infinity,
)
