"""Empirical Kolmogorov-type moment scaling of sampled drivers."""

import logging
from typing import List, Optional

import numpy as np
from scipy import stats

from ..core.config import MIN_MOMENT_SAMPLES
from ..core.errors import DiagnosticRefusal
from ..core.models import FbmSpec, KolmogorovReport
from .fbm import sample_fbm_batch

logger = logging.getLogger(__name__)

SLOPE_SLACK = 0.1


def dyadic_block_sizes(steps: int, max_levels: Optional[int] = None) -> List[int]:
    """Block sizes 1, 2, 4, ... that divide ``steps``, coarsest last."""
    sizes = []
    b = 1
    while b <= steps and steps % b == 0:
        sizes.append(b)
        b *= 2
    if max_levels is not None:
        sizes = sizes[-max_levels:]
    return sizes


def _block_moments(paths: np.ndarray, block: int, p: float) -> np.ndarray:
    """Per-sample mean of |W|^p + |A|^(p/2) over consecutive blocks.

    ``paths`` has shape (samples, steps + 1, m); the block area is folded from
    the fine linear pieces.
    """
    samples, points, m = paths.shape
    steps = points - 1
    blocks = steps // block
    q = p / 2.0

    dw = np.diff(paths, axis=1)
    start = paths[:, :-1:block, :]
    local = paths[:, :-1, :] - np.repeat(start, block, axis=1)
    fine = 0.5 * np.einsum("ski,skj->skij", dw, dw) + np.einsum("ski,skj->skij", local, dw)
    area = fine.reshape(samples, blocks, block, m, m).sum(axis=2)
    inc = paths[:, block::block, :] - start

    level1 = np.linalg.norm(inc, axis=2) ** p
    level2 = np.linalg.norm(area, axis=(2, 3)) ** q
    return (level1 + level2).mean(axis=1)


def kolmogorov_check(spec: FbmSpec, p: float = 4.0, n_samples: int = 1000, max_levels: Optional[int] = 8) -> KolmogorovReport:
    """Fit log E(|W_st|^p + |A_st|^(p/2)) against log |t - s| on dyadic intervals.

    The run uses the grid of ``spec`` and independent samples derived from
    ``spec.seed``; the check passes when the slope is at least p * H - 0.1.

    Raises:
        DiagnosticRefusal: for fewer than the minimum number of samples or
        fewer than two dyadic levels.
    """
    if n_samples < MIN_MOMENT_SAMPLES:
        raise DiagnosticRefusal(f"kolmogorov_check needs at least {MIN_MOMENT_SAMPLES} samples, got {n_samples}")
    sizes = dyadic_block_sizes(spec.steps, max_levels)
    if len(sizes) < 2:
        raise DiagnosticRefusal(f"steps={spec.steps} admits fewer than two dyadic levels")

    seeds = np.random.SeedSequence(spec.seed).generate_state(spec.m)
    if spec.identical_components:
        seeds = np.full(spec.m, seeds[0])
    cols = [sample_fbm_batch(spec.hurst, spec.dt, spec.steps, n_samples, int(s)) for s in seeds]
    paths = np.stack(cols, axis=2)

    scales = [block * spec.dt for block in sizes]
    moments = [float(_block_moments(paths, block, p).mean()) for block in sizes]

    fit = stats.linregress(np.log(scales), np.log(moments))
    slope = float(fit.slope)
    passed = slope >= p * spec.hurst - SLOPE_SLACK
    logger.info("Kolmogorov slope %.4f (target %.4f) for H=%s, p=%s", slope, p * spec.hurst, spec.hurst, p)

    return KolmogorovReport(
        p=p,
        q=p / 2.0,
        hurst=spec.hurst,
        scales=scales,
        moments=moments,
        slope=slope,
        intercept=float(fit.intercept),
        passed=passed,
        samples=n_samples,
    )
