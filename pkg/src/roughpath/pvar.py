"""p-variation of grid paths and the rough p-variation seminorm.

Both levels use the same dynamic programme over grid indices:

    best[s] = 0,  best[j] = max_{s <= i < j} best[i] + dist(i, j) ** p

so ``best[j]`` is the supremum over all grid partitions of [t_s, t_j] of the
p-th power sums. The loop costs O(n^2) per interval.
"""

import logging
from typing import Callable, Optional

import numpy as np

from ..core.errors import RoughPathParameterError
from ..core.models import PVarParams, RoughDriver
from ..noise.lift import cumulative_areas

logger = logging.getLogger(__name__)

# dist_to(j, i0) -> distances from grid points i0..j-1 to j
DistanceColumn = Callable[[int, int], np.ndarray]


def _as_matrix(path: np.ndarray) -> np.ndarray:
    arr = np.asarray(path, dtype=np.float64)
    return arr[:, None] if arr.ndim == 1 else arr


def _resolve(n_points: int, start: int, end: Optional[int]) -> int:
    stop = n_points - 1 if end is None else end
    if not 0 <= start <= stop <= n_points - 1:
        raise RoughPathParameterError(f"grid interval [{start}, {stop}] outside [0, {n_points - 1}]")
    return stop


def forward_power_sums(dist_to: DistanceColumn, start: int, stop: int, p: float) -> np.ndarray:
    """best[t] for t = start..stop (index 0 is the start point itself)."""
    best = np.zeros(stop - start + 1)
    for j in range(start + 1, stop + 1):
        k = j - start
        best[k] = np.max(best[:k] + dist_to(j, start) ** p)
    return best


def level1_distances(w: np.ndarray) -> DistanceColumn:
    def dist_to(j: int, i0: int) -> np.ndarray:
        return np.linalg.norm(w[j] - w[i0:j], axis=1)

    return dist_to


def level2_distances(w: np.ndarray, cum: np.ndarray) -> DistanceColumn:
    """Frobenius norm of the second level over [t_i, t_j] from cumulative areas."""

    def dist_to(j: int, i0: int) -> np.ndarray:
        wi = w[i0:j]
        area = cum[j] - cum[i0:j] - np.einsum("ia,ib->iab", wi, w[j] - wi)
        return np.linalg.norm(area, axis=(1, 2))

    return dist_to


def p_variation(path: np.ndarray, p: float, start: int = 0, end: Optional[int] = None) -> float:
    """Exact p-variation over grid partitions of [start, end] (grid indices).

    Args:
        path: samples of shape (n + 1,) or (n + 1, m); increments use the
            Euclidean norm
        p: exponent, p >= 1
        start, end: grid indices; ``end`` defaults to the last point

    Returns:
        float: (sup sum |x_{t_k} - x_{t_{k-1}}|^p)^(1/p), 0 for an empty interval
    """
    if p < 1:
        raise RoughPathParameterError(f"p-variation needs p >= 1, got {p}")
    w = _as_matrix(path)
    stop = _resolve(w.shape[0], start, end)
    if stop == start:
        return 0.0
    best = forward_power_sums(level1_distances(w), start, stop, p)
    return float(best[-1] ** (1.0 / p))


def rough_power_profile(driver: RoughDriver, params: PVarParams, start: int, stop: int, cum: Optional[np.ndarray] = None) -> np.ndarray:
    """|||W|||^p over [t_start, t] for every t = start..stop."""
    cum = cumulative_areas(driver) if cum is None else cum
    lvl1 = forward_power_sums(level1_distances(driver.w), start, stop, params.p)
    lvl2 = forward_power_sums(level2_distances(driver.w, cum), start, stop, params.q)
    return lvl1 + lvl2


def rough_pvar(driver: RoughDriver, params: Optional[PVarParams] = None, start: int = 0, end: Optional[int] = None) -> float:
    """Rough seminorm (||W||_p-var^p + ||A||_q-var^q)^(1/p) with q = p / 2.

    Both suprema are taken separately over grid partitions; second level
    values between grid points come from Chen's relation.
    """
    params = params or PVarParams()
    stop = _resolve(driver.steps + 1, start, end)
    if stop == start:
        return 0.0
    profile = rough_power_profile(driver, params, start, stop)
    return float(profile[-1] ** (1.0 / params.p))
