"""Fractional Brownian motion sampling by circulant embedding."""

import logging
from typing import Optional

import numpy as np
import scipy.linalg

from ..core.errors import FbmGenerationError
from ..core.models import FbmSpec

logger = logging.getLogger(__name__)

# relative size of negative circulant eigenvalues that still counts as round-off
EIGEN_CLIP_RTOL = 1e-10
BATCH_CHUNK = 512


def fgn_autocovariance(hurst: float, n: int) -> np.ndarray:
    """Autocovariance gamma(0..n) of unit-step fractional Gaussian noise."""
    k = np.arange(n + 1, dtype=np.float64)
    two_h = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** two_h - 2.0 * np.abs(k) ** two_h + np.abs(k - 1) ** two_h)


def circulant_eigenvalues(hurst: float, n: int) -> np.ndarray:
    """Eigenvalues of the 2n circulant matrix embedding the fGn covariance."""
    gamma = fgn_autocovariance(hurst, n)
    row = np.concatenate([gamma, gamma[n - 1:0:-1]])
    return np.real(np.fft.fft(row))


def _embedding_sqrt(hurst: float, n: int) -> Optional[np.ndarray]:
    """sqrt(lambda / M) or None when the embedding is not nonnegative."""
    lam = circulant_eigenvalues(hurst, n)
    floor = -EIGEN_CLIP_RTOL * max(1.0, float(np.max(np.abs(lam))))
    if np.min(lam) < floor:
        return None
    return np.sqrt(np.clip(lam, 0.0, None) / lam.size)


def _cholesky_factor(hurst: float, n: int) -> np.ndarray:
    gamma = fgn_autocovariance(hurst, n)
    try:
        return scipy.linalg.cholesky(scipy.linalg.toeplitz(gamma[:n]), lower=True)
    except np.linalg.LinAlgError as e:
        raise FbmGenerationError(f"Cholesky factorisation of the fGn covariance failed (H={hurst}, n={n}): {e}")


def _fgn(rng: np.random.Generator, hurst: float, n: int, size: int, root: Optional[np.ndarray]) -> np.ndarray:
    """Unit-step fGn, shape (size, n)."""
    if root is not None:
        m = root.size
        z = rng.standard_normal((size, m)) + 1j * rng.standard_normal((size, m))
        return np.real(np.fft.fft(root * z, axis=1))[:, :n]
    chol = _cholesky_factor(hurst, n)
    return rng.standard_normal((size, n)) @ chol.T


def _to_path(fgn: np.ndarray, dt: float, hurst: float) -> np.ndarray:
    out = np.zeros((fgn.shape[0], fgn.shape[1] + 1))
    np.cumsum(fgn * dt**hurst, axis=1, out=out[:, 1:])
    return out


def sample_fbm(spec: FbmSpec) -> np.ndarray:
    """Exact fBm sample on the grid k * dt, shape (steps + 1, m).

    Every column draws from its own stream spawned from ``spec.seed``; with
    ``identical_components`` all columns repeat column 0.

    Raises:
        FbmGenerationError: if neither the circulant embedding nor the
        Cholesky fallback yields a sample.
    """
    n = spec.steps
    root = _embedding_sqrt(spec.hurst, n)
    if root is None:
        logger.warning("Circulant embedding not nonnegative for H=%s, n=%d; using Cholesky", spec.hurst, n)

    columns = 1 if spec.identical_components else spec.m
    streams = np.random.SeedSequence(spec.seed).spawn(columns)
    paths = np.empty((n + 1, columns))
    for j, child in enumerate(streams):
        rng = np.random.default_rng(child)
        paths[:, j] = _to_path(_fgn(rng, spec.hurst, n, 1, root), spec.dt, spec.hurst)[0]

    if spec.identical_components and spec.m > 1:
        paths = np.repeat(paths, spec.m, axis=1)
    return paths


def sample_fbm_batch(hurst: float, dt: float, steps: int, n_samples: int, seed: int = 0) -> np.ndarray:
    """Many independent scalar fBm paths at once, shape (n_samples, steps + 1).

    Shares the circulant eigenvalues across samples; used by the Monte Carlo checks.
    """
    root = _embedding_sqrt(hurst, steps)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    out = np.empty((n_samples, steps + 1))
    for start in range(0, n_samples, BATCH_CHUNK):
        size = min(BATCH_CHUNK, n_samples - start)
        out[start:start + size] = _to_path(_fgn(rng, hurst, steps, size, root), dt, hurst)
    return out
