"""Drift and noise coefficients of the rough Kuramoto system."""

import logging
from typing import Optional, Tuple

import numpy as np

from ..core.errors import ConfigurationError
from ..core.models import SignedGraph, SystemConfig

logger = logging.getLogger(__name__)

FD_STEP = 1e-6


def phase_differences(theta: np.ndarray) -> np.ndarray:
    """diff[i, k] = theta_i - theta_k."""
    theta = np.asarray(theta, dtype=np.float64)
    return theta[:, None] - theta[None, :]


def kuramoto_drift(theta: np.ndarray, cfg: SystemConfig, graph: Optional[SignedGraph] = None) -> np.ndarray:
    """f_i = varpi_i + K/N sum_j a_ij sin(theta_j - theta_i).

    Args:
        theta: phases, shape (N,)
        cfg: system configuration
        graph: coupling to use instead of ``cfg.graph``
    """
    a = (graph or cfg.graph).weights
    coupling = (a * np.sin(-phase_differences(theta))).sum(axis=1)
    return cfg.natural_freqs + cfg.K / cfg.n * coupling


def _sine_poly_column(theta: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    s = np.sin(phase_differences(theta)) ** cfg.n_tilde
    return cfg.sigma * (cfg.noise_graph.weights * s).sum(axis=1)


def noise_G(theta: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """Sine polynomial noise G_ij = sigma sum_k b_ik sin(theta_i - theta_k)^n_tilde.

    Every one of the ``cfg.driver_dim`` columns is the same vector.
    """
    col = _sine_poly_column(theta, cfg)
    return np.repeat(col[:, None], cfg.driver_dim, axis=1)


def check_diagonal_regime(cfg: SystemConfig) -> bool:
    """Warn when diagonal noise runs with independent driver components."""
    if cfg.driver_dim > 1 and not cfg.identical_components:
        logger.warning(
            "diagonalSine noise with %d independent driver components: the mean phase is not conserved",
            cfg.driver_dim,
        )
        return False
    return True


def noise_G_diagonal(theta: np.ndarray, cfg: SystemConfig, warn: bool = True) -> np.ndarray:
    """Diagonal noise G_i = sigma sin(theta_i).

    With one driver column the result is (N, 1); with N columns oscillator i
    is driven by column i only.
    """
    if warn:
        check_diagonal_regime(cfg)
    values = cfg.sigma * np.sin(np.asarray(theta, dtype=np.float64))
    if cfg.driver_dim == 1:
        return values[:, None]
    return np.diag(values)


def _custom_G(theta: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    g = np.asarray(cfg.custom_noise(np.asarray(theta, dtype=np.float64), cfg), dtype=np.float64)
    if g.shape != (cfg.n, cfg.driver_dim):
        raise ConfigurationError(f"custom noise returned shape {g.shape}, expected {(cfg.n, cfg.driver_dim)}")
    return g


def noise_matrix(theta: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """G(theta) of shape (N, m) for the configured noise family."""
    if cfg.noise_kind == "sinePolynomial":
        return noise_G(theta, cfg)
    if cfg.noise_kind == "diagonalSine":
        return noise_G_diagonal(theta, cfg, warn=False)
    return _custom_G(theta, cfg)


def noise_jacobian(theta: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """DG[i, j, l] = d G_ij / d theta_l, shape (N, m, N).

    Analytic for the two built-in families, central differences for custom noise.
    """
    theta = np.asarray(theta, dtype=np.float64)
    n, m = cfg.n, cfg.driver_dim

    if cfg.noise_kind == "sinePolynomial":
        diff = phase_differences(theta)
        nt = cfg.n_tilde
        term = cfg.noise_graph.weights * nt * np.sin(diff) ** (nt - 1) * np.cos(diff)
        jac = cfg.sigma * (np.diag(term.sum(axis=1)) - term)
        return np.repeat(jac[:, None, :], m, axis=1)

    if cfg.noise_kind == "diagonalSine":
        dg = cfg.sigma * np.cos(theta)
        out = np.zeros((n, m, n))
        idx = np.arange(n)
        if m == 1:
            out[idx, 0, idx] = dg
        else:
            out[idx, idx, idx] = dg
        return out

    out = np.empty((n, m, n))
    for l in range(n):
        e = np.zeros(n)
        e[l] = FD_STEP
        out[:, :, l] = (_custom_G(theta + e, cfg) - _custom_G(theta - e, cfg)) / (2 * FD_STEP)
    return out


def tilde_G(gmat: np.ndarray) -> np.ndarray:
    """Column-centred noise G_ij - mean_k G_kj."""
    g = np.asarray(gmat, dtype=np.float64)
    return g - g.mean(axis=0, keepdims=True)


def reduce_state(theta: np.ndarray) -> Tuple[np.ndarray, float]:
    """Split phases into the zero-mean part and the mean phase."""
    theta = np.asarray(theta, dtype=np.float64)
    mean = float(theta.mean())
    return theta - mean, mean


def frequency_drift(varpi: np.ndarray, theta: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """h_i = K/N sum_j a_ij cos(theta_j - theta_i)(varpi_j - varpi_i)."""
    varpi = np.asarray(varpi, dtype=np.float64)
    a = cfg.graph.weights
    spread = varpi[None, :] - varpi[:, None]
    return cfg.K / cfg.n * (a * np.cos(-phase_differences(theta)) * spread).sum(axis=1)
