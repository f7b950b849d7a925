"""Dissipation of the norm Lyapunov function, the rate bound and the basin radius."""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.config import DEFAULT_CP, LIPSCHITZ_SAMPLES
from ..core.errors import DiagnosticRefusal, RoughPathParameterError
from ..core.models import BasinReport, LyapunovReport, PVarParams, RateBoundReport, RoughDriver, SystemConfig
from ..graph.structure import is_connected
from ..model.hypotheses import c_two_delta, coupling_lambda2, dissipation, sample_cg
from ..roughpath.greedy import greedy_times

logger = logging.getLogger(__name__)

MARGIN_ATOL = 1e-10
LYAPUNOV_SEED = 1234
CHUNK = 1024


def sample_reduced_states(n: int, delta: float, n_samples: int, seed: int) -> np.ndarray:
    """Zero-mean states with sup norm at most ``delta``.

    Half of the draws sit on the boundary ||x||_inf = delta, the rest are
    scaled down by a uniform factor. The zero state is never returned.
    """
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=(n_samples, n))
    x -= x.mean(axis=1, keepdims=True)
    sup = np.abs(x).max(axis=1)
    sup[sup == 0.0] = 1.0
    scale = rng.uniform(0.0, 1.0, size=n_samples)
    scale[::2] = 1.0
    scale[scale == 0.0] = 0.5
    return x * (delta * scale / sup)[:, None]


def _batch_coupling(states: np.ndarray, weights: np.ndarray, k_over_n: float) -> np.ndarray:
    # [s, i, j] = theta_j - theta_i
    diff = states[:, None, :] - states[:, :, None]
    return k_over_n * (weights[None] * np.sin(diff)).sum(axis=2)


def lyapunov_check(
    cfg: SystemConfig,
    n_samples: int = 10_000,
    seed: int = LYAPUNOV_SEED,
    tolerance: float = MARGIN_ATOL,
) -> LyapunovReport:
    """Largest sampled value of <x/|x|, f(x)> + d |x| over zero-mean x in I_delta.

    f is the mean-reduced drift, so the natural frequencies only enter through
    their mean and drop out. Every margin should be <= 0.

    Raises:
        DiagnosticRefusal: for signed or disconnected coupling, or delta outside (0, pi/2)
    """
    g = cfg.graph
    if not g.is_nonnegative:
        raise DiagnosticRefusal("the dissipation estimate needs nonnegative coupling")
    if not is_connected(g):
        raise DiagnosticRefusal("disconnected coupling has lambda_2 = 0, the dissipation claim is vacuous")
    if not 0.0 < cfg.delta < math.pi / 2:
        raise DiagnosticRefusal(f"delta must lie in (0, pi/2), got {cfg.delta}")

    lam2, _ = coupling_lambda2(cfg)
    d = dissipation(cfg, lam2)
    states = sample_reduced_states(cfg.n, cfg.delta, n_samples, seed)
    worst = -math.inf
    violations = 0
    for start in range(0, n_samples, CHUNK):
        x = states[start : start + CHUNK]
        f = _batch_coupling(x, g.weights, cfg.K / cfg.n)
        f -= f.mean(axis=1, keepdims=True)
        norm = np.linalg.norm(x, axis=1)
        margin = np.einsum("si,si->s", x, f) / norm + d * norm
        worst = max(worst, float(margin.max()))
        violations += int(np.count_nonzero(margin > tolerance))

    if violations:
        logger.warning("Lyapunov margin positive on %d of %d samples (worst %.3g)", violations, n_samples, worst)
    return LyapunovReport(
        worst_margin=worst,
        d=d,
        c_two_delta=c_two_delta(cfg.delta),
        lambda2=lam2,
        samples=n_samples,
        violations=violations,
        tolerance=tolerance,
    )


def drift_jacobian(theta: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """J[i, l] = d f_i / d theta_l of the Kuramoto drift."""
    theta = np.asarray(theta, dtype=np.float64)
    c = cfg.graph.weights * np.cos(theta[None, :] - theta[:, None])
    k_over_n = cfg.K / cfg.n
    return k_over_n * (c - np.diag(c.sum(axis=1)))


def drift_lipschitz(cfg: SystemConfig, n_points: int = LIPSCHITZ_SAMPLES, seed: int = LYAPUNOV_SEED + 1) -> float:
    """Largest spectral norm of the drift Jacobian over sampled states in I_delta."""
    states = sample_reduced_states(cfg.n, cfg.delta, n_points, seed)
    states[0] = 0.0
    return max(float(np.linalg.norm(drift_jacobian(x, cfg), ord=2)) for x in states)


def theorem_rate_bound(
    cfg: SystemConfig,
    en_estimate: float,
    cp: float = DEFAULT_CP,
    c_g: Optional[float] = None,
    cg_points: Optional[int] = None,
) -> RateBoundReport:
    """Upper bound d - (2 + C_G) C_G - C_G E[N] on admissible convergence rates.

    ``en_estimate`` is the expected greedy count on [0, 1] for the threshold
    1 / (16 cp). A positive bound means the stability regime is active for
    the sampled C_G.
    """
    lam2, note = coupling_lambda2(cfg)
    if note:
        logger.info(note)
    d = dissipation(cfg, lam2)
    cg = sample_cg(cfg, cg_points) if c_g is None else c_g
    bound = d - (2.0 + cg) * cg - cg * en_estimate
    logger.debug("rate bound: d=%.6g C_G=%.6g E[N]=%.6g -> %.6g", d, cg, en_estimate, bound)
    return RateBoundReport(
        d=d,
        c_delta=c_two_delta(cfg.delta),
        lambda2=lam2,
        c_g=cg,
        en_estimate=en_estimate,
        bound=bound,
        cp=cp,
        positive=bound > 0,
        K=cfg.K,
        N=cfg.n,
        delta=cfg.delta,
    )


def basin_exponents(counts: Sequence[int], eta: float, lam: float) -> np.ndarray:
    """eta n - lam sum_{k <= n} N_k for n = 0 .. len(counts) - 1."""
    n = np.arange(len(counts), dtype=np.float64)
    return eta * n - lam * np.cumsum(np.asarray(counts, dtype=np.float64))


def basin_radius_from_counts(counts: Sequence[int], eps: float, eta: float, lam: float) -> Tuple[float, int]:
    """eps times the smallest exp(exponent) over the available n, and that n."""
    if not len(counts):
        raise DiagnosticRefusal("the basin radius needs at least one unit interval")
    exponents = basin_exponents(counts, eta, lam)
    best = int(np.argmin(exponents))
    return eps * math.exp(float(exponents[best])), best


def basin_radius_truncated(
    cfg: SystemConfig,
    driver: RoughDriver,
    eps: float,
    n_max: int,
    lam: float,
    cp: float = DEFAULT_CP,
    params: Optional[PVarParams] = None,
    c_g: Optional[float] = None,
    l_f: Optional[float] = None,
) -> BasinReport:
    """Basin radius r(omega) truncated to the unit intervals [k, k+1], k < n_max.

    r = eps min_n exp(eta n - lam sum_{k <= n} N_k) with N_k the greedy count
    of the driver on [k, k+1] for the threshold lam / (16 cp C_G) and
    eta = d - L_f (2 + lam) lam.

    Raises:
        DiagnosticRefusal: for eps outside (0, delta), lam outside (0, 1) or a
            driver shorter than n_max
    """
    if not 0.0 < eps < cfg.delta:
        raise DiagnosticRefusal(f"eps must lie in (0, delta={cfg.delta}), got {eps}")
    if not 0.0 < lam < 1.0:
        raise DiagnosticRefusal(f"lambda must lie in (0, 1), got {lam}")
    if n_max < 1 or driver.times[-1] < n_max - 1e-9 * n_max:
        raise DiagnosticRefusal(f"driver covers [0, {driver.times[-1]}], need [0, {n_max}]")

    cg = sample_cg(cfg) if c_g is None else c_g
    if cg == 0.0:
        return BasinReport(
            radius=eps,
            minimizing_n=0,
            eps=eps,
            lam=lam,
            eta=None,
            l_f=None,
            note="C_G = 0: no noise, the basin is the deterministic one",
        )

    lip = drift_lipschitz(cfg) if l_f is None else l_f
    lam2, _ = coupling_lambda2(cfg)
    eta = dissipation(cfg, lam2) - lip * (2.0 + lam) * lam
    gamma = lam / (16.0 * cp * cg)
    counts: List[int] = []
    try:
        for k in range(n_max):
            counts.append(greedy_times(driver, gamma, params, a=float(k), b=float(k + 1), cp=cp).count)
    except RoughPathParameterError as e:
        raise DiagnosticRefusal(f"unit intervals are not on the driver grid: {e}")

    radius, best = basin_radius_from_counts(counts, eps, eta, lam)
    note = None
    if best == n_max - 1:
        note = "minimum reached at the truncation index; a longer driver may lower the radius"
    return BasinReport(radius=radius, minimizing_n=best, eps=eps, lam=lam, eta=eta, l_f=lip, counts=counts, note=note)
