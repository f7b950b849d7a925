"""Greedy times of a rough driver and Monte Carlo statistics of their count."""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from ..core.config import DEFAULT_CP, MIN_EN_TRIALS
from ..core.errors import RoughPathParameterError
from ..core.models import CountEstimate, FbmSpec, GreedyPartition, MomentTail, PVarParams, RoughDriver
from ..noise.lift import cumulative_areas, sample_driver
from .pvar import level1_distances, level2_distances, rough_power_profile

logger = logging.getLogger(__name__)

GRID_RTOL = 1e-9


def grid_index(driver: RoughDriver, t: float) -> int:
    """Index of the grid point at time ``t``.

    Raises:
        RoughPathParameterError: if ``t`` is off the grid or outside it
    """
    x = t / driver.dt
    k = int(round(x))
    if abs(x - k) > GRID_RTOL * max(1.0, abs(x)) or not 0 <= k <= driver.steps:
        raise RoughPathParameterError(f"time {t} is not a grid point of a driver with dt={driver.dt}, steps={driver.steps}")
    return k


def _scan(driver: RoughDriver, cum: np.ndarray, start: int, stop: int, params: PVarParams, target: float) -> Tuple[int, float]:
    """First grid index after ``start`` whose rough power sum reaches ``target``.

    Returns (index, power sum at that index); (stop, power sum over the whole
    remaining interval) if the target is never reached.
    """
    d1 = level1_distances(driver.w)
    d2 = level2_distances(driver.w, cum)
    size = stop - start + 1
    best1 = np.zeros(size)
    best2 = np.zeros(size)
    for j in range(start + 1, stop + 1):
        k = j - start
        best1[k] = np.max(best1[:k] + d1(j, start) ** params.p)
        best2[k] = np.max(best2[:k] + d2(j, start) ** params.q)
        if best1[k] + best2[k] >= target:
            return j, float(best1[k] + best2[k])
    return stop, float(best1[-1] + best2[-1])


def greedy_times(
    driver: RoughDriver,
    gamma: float,
    params: Optional[PVarParams] = None,
    a: float = 0.0,
    b: Optional[float] = None,
    cp: float = DEFAULT_CP,
) -> GreedyPartition:
    """Greedy partition of [a, b] for the threshold ``gamma``.

    tau_0 = a and tau_{k+1} is the first grid time after tau_k at which the
    rough seminorm over [tau_k, t] reaches gamma, or b if it never does. The
    count is the number of intervals, so a quiet driver gives 1.

    Each step scans forward with the incremental p-variation programme, which
    yields the seminorm for every candidate t at once and finds the same
    first crossing as a bisection over grid indices.

    Raises:
        RoughPathParameterError: for gamma <= 0 or an interval off the grid
    """
    if not gamma > 0:
        raise RoughPathParameterError(f"gamma must be positive, got {gamma}")
    params = params or PVarParams()
    lo = grid_index(driver, a)
    hi = driver.steps if b is None else grid_index(driver, b)
    if hi < lo:
        raise RoughPathParameterError(f"empty interval [{a}, {b}]")

    cum = cumulative_areas(driver)
    target = gamma**params.p
    indices: List[int] = [lo]
    seminorms: List[float] = []
    current = lo
    while current < hi:
        nxt, power = _scan(driver, cum, current, hi, params, target)
        indices.append(nxt)
        seminorms.append(power ** (1.0 / params.p))
        current = nxt
    if len(indices) == 1:
        # degenerate [a, a]: one (empty) interval
        indices.append(hi)
        seminorms.append(0.0)

    return GreedyPartition(
        taus=[float(driver.times[i]) for i in indices],
        indices=indices,
        count=len(indices) - 1,
        gamma=gamma,
        cp=cp,
        seminorms=seminorms,
    )


def _trial_seed(spec: FbmSpec, k: int) -> int:
    return int(np.random.SeedSequence([spec.seed, k]).generate_state(1)[0])


def _unit_spec(spec: FbmSpec) -> FbmSpec:
    steps = int(round(1.0 / spec.dt))
    if abs(steps * spec.dt - 1.0) > GRID_RTOL:
        raise RoughPathParameterError(f"dt={spec.dt} does not divide [0, 1]")
    return spec.model_copy(update={"steps": steps})


def sample_counts(
    spec: FbmSpec, gamma: float, params: Optional[PVarParams] = None, trials: int = MIN_EN_TRIALS, with_seminorms: bool = False
) -> Tuple[List[int], List[float]]:
    """Greedy counts on [0, 1] over independent drivers; trial k uses seed (spec.seed, k)."""
    params = params or PVarParams()
    unit = _unit_spec(spec)
    counts: List[int] = []
    seminorms: List[float] = []
    for k in range(trials):
        driver = sample_driver(unit.model_copy(update={"seed": _trial_seed(spec, k)}))
        part = greedy_times(driver, gamma, params, 0.0, 1.0)
        counts.append(part.count)
        if with_seminorms:
            profile = rough_power_profile(driver, params, 0, driver.steps)
            seminorms.append(float(profile[-1] ** (1.0 / params.p)))
    return counts, seminorms


def estimate_EN(
    spec: FbmSpec, gamma: float, params: Optional[PVarParams] = None, trials: int = MIN_EN_TRIALS, with_seminorms: bool = False
) -> CountEstimate:
    """Monte Carlo mean and standard error of N(gamma, W, [0, 1]).

    Raises:
        RoughPathParameterError: for fewer than the minimum number of trials
    """
    if trials < MIN_EN_TRIALS:
        raise RoughPathParameterError(f"estimate_EN needs at least {MIN_EN_TRIALS} trials, got {trials}")
    counts, seminorms = sample_counts(spec, gamma, params, trials, with_seminorms)
    arr = np.asarray(counts, dtype=np.float64)
    stderr = float(arr.std(ddof=1) / math.sqrt(arr.size))
    logger.info("E N(%g) = %.4f +/- %.4f over %d trials (H=%s)", gamma, arr.mean(), stderr, trials, spec.hurst)
    return CountEstimate(
        mean=float(arr.mean()),
        stderr=stderr,
        counts=counts,
        gamma=gamma,
        trials=trials,
        seminorms=seminorms,
    )


def moment_condition_exponent(p: float, p_tilde: Optional[float] = None) -> float:
    """(2 (p_tilde + p) - 1) / p, the exponent of the moment condition on the counts."""
    pt = p if p_tilde is None else p_tilde
    return (2.0 * (pt + p) - 1.0) / p


def moment_tail(
    spec: FbmSpec,
    gamma: float,
    params: Optional[PVarParams] = None,
    trials: int = MIN_EN_TRIALS,
    exponent: Optional[float] = None,
) -> MomentTail:
    """Empirical E N^k and count quantiles; finiteness is not decided here."""
    params = params or PVarParams()
    k = moment_condition_exponent(params.p) if exponent is None else exponent
    counts, _ = sample_counts(spec, gamma, params, trials)
    arr = np.asarray(counts, dtype=np.float64)
    quantiles = {f"q{int(q * 100)}": float(np.quantile(arr, q)) for q in (0.5, 0.9, 0.99)}
    return MomentTail(exponent=k, moment=float(np.mean(arr**k)), max_count=int(arr.max()), quantiles=quantiles)
