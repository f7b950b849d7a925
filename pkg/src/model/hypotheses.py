"""Structural hypothesis checks and the sampled noise constant C_G."""

import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..core.config import CG_SAMPLES
from ..core.models import HypothesisReport, SystemConfig
from ..graph.spectral import spectrum
from ..graph.structure import balance_partition, components_balanced, connected_components
from .switching import switched_graph
from .vector_fields import noise_jacobian, noise_matrix

logger = logging.getLogger(__name__)

CG_FD_STEP = 1e-4
CG_SEED = 20240601
CHECK_POINTS = 64
CHECK_ATOL = 1e-12


def c_two_delta(delta: float) -> float:
    """sin(2 delta) / (2 delta), with the limit 1 at delta = 0."""
    if delta == 0.0:
        return 1.0
    return math.sin(2.0 * delta) / (2.0 * delta)


def dissipation(cfg: SystemConfig, lambda2: Optional[float] = None) -> float:
    """d = K C_{2 delta} lambda_2 / N."""
    lam2 = coupling_lambda2(cfg)[0] if lambda2 is None else lambda2
    return cfg.K * c_two_delta(cfg.delta) * lam2 / cfg.n


def coupling_lambda2(cfg: SystemConfig) -> Tuple[float, Optional[str]]:
    """Spectral gap governing the dissipation, with a note on how it was obtained.

    Nonnegative coupling uses its own Laplacian, balanced signed coupling the
    switched graph; unbalanced signed coupling has no dissipation (0).
    """
    g = cfg.graph
    if g.is_nonnegative:
        return spectrum(g).fiedler, None
    partition = balance_partition(g)
    if partition is not None:
        return spectrum(switched_graph(g, partition)).fiedler, "signed balanced coupling: lambda_2 taken from the switched graph"
    return 0.0, "unbalanced signed coupling: dissipation set to 0"


def _op_norm(t: np.ndarray) -> float:
    """Spectral norm of a tensor viewed as a map into R^N (first axis)."""
    return float(np.linalg.norm(t.reshape(t.shape[0], -1), ord=2))


def _test_states(n: int, n_points: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    states = rng.uniform(-math.pi, math.pi, size=(max(n_points, 1), n))
    states[0] = 0.0
    return states


def sample_cg(cfg: SystemConfig, n_points: Optional[int] = None, seed: int = CG_SEED) -> float:
    """Sampled C_G = max of sup norms of G, DG, D^2 G and D^3 G.

    DG is analytic; D^2 G and D^3 G are central differences of DG along a
    random unit direction per test state. States are uniform on the torus and
    fixed by ``seed``, so C_G is linear in sigma for a given graph.
    """
    if cfg.sigma == 0.0:
        return 0.0
    count = CG_SAMPLES if n_points is None else n_points
    states = _test_states(cfg.n, count, seed)
    dirs = np.random.default_rng(seed + 1).standard_normal(states.shape)
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)

    h = CG_FD_STEP
    best = 0.0
    for theta, v in zip(states, dirs):
        g = noise_matrix(theta, cfg)
        dg = noise_jacobian(theta, cfg)
        dg_plus = noise_jacobian(theta + h * v, cfg)
        dg_minus = noise_jacobian(theta - h * v, cfg)
        d2 = (dg_plus - dg_minus) / (2.0 * h)
        d3 = (dg_plus - 2.0 * dg + dg_minus) / (h * h)
        best = max(best, _op_norm(g), _op_norm(dg), _op_norm(d2), _op_norm(d3))
    return best


def _column_sums_vanish(cfg: SystemConfig, groups: List[List[int]]) -> bool:
    for theta in _test_states(cfg.n, CHECK_POINTS, CG_SEED + 2):
        g = noise_matrix(theta, cfg)
        scale = max(1.0, float(np.abs(g).max()))
        for idx in groups:
            if np.any(np.abs(g[idx].sum(axis=0)) > CHECK_ATOL * scale * cfg.n):
                return False
    return True


def _rotation_invariant(cfg: SystemConfig) -> bool:
    rng = np.random.default_rng(CG_SEED + 3)
    for theta in _test_states(cfg.n, CHECK_POINTS, CG_SEED + 4):
        a = rng.uniform(-math.pi, math.pi)
        diff = noise_matrix(theta + a, cfg) - noise_matrix(theta, cfg)
        if np.max(np.abs(diff)) > 1e-12 * max(1.0, cfg.sigma):
            return False
    return True


def validate_hypotheses(
    cfg: SystemConfig,
    en_estimate: Optional[float] = None,
    cg_points: Optional[int] = None,
) -> HypothesisReport:
    """Report which structural hypotheses ``cfg`` satisfies.

    Flags: symmetric, nonnegative, A (nonnegative and connected), AI
    (nonnegative), AII (connected and balanced), AIII (every component
    balanced), B (identical natural frequencies), H_W (Hurst range), H_W+
    (identical driver components), H_G (G(0) = 0 and rotation invariance),
    H_G+ (column sums vanish), H_GI+ (column sums vanish per component),
    H_GII (diagonal noise).

    The smallness of C_G is only compared with the dissipation d; the
    threshold of the synchronisation result is not constructive.
    """
    g = cfg.graph
    labels = connected_components(g)
    n_components = len(set(labels))
    groups = [[i for i, lab in enumerate(labels) if lab == c] for c in range(n_components)]
    partition = balance_partition(g)
    nonneg = g.is_nonnegative
    connected = n_components == 1

    zero_at_origin = bool(np.all(np.abs(noise_matrix(np.zeros(cfg.n), cfg)) <= CHECK_ATOL))
    rot_inv = _rotation_invariant(cfg)
    hg_plus = _column_sums_vanish(cfg, [list(range(cfg.n))])
    hgi_plus = _column_sums_vanish(cfg, groups)

    flags: Dict[str, bool] = {
        "symmetric": True,
        "nonnegative": nonneg,
        "A": nonneg and connected,
        "AI": nonneg,
        "AII": connected and partition is not None,
        "AIII": components_balanced(g),
        "B": bool(np.ptp(cfg.natural_freqs) <= 1e-12) if cfg.n else True,
        "H_W": 1.0 / 3.0 < cfg.hurst <= 0.5,
        "H_W+": cfg.identical_components or cfg.driver_dim == 1,
        "H_G": zero_at_origin and rot_inv,
        "H_G+": hg_plus,
        "H_GI+": hgi_plus,
        "H_GII": cfg.noise_kind == "diagonalSine",
    }

    c_g = sample_cg(cfg, cg_points)
    notes: List[str] = []
    lam2, lam2_note = coupling_lambda2(cfg)
    if lam2_note:
        notes.append(lam2_note)
    d = dissipation(cfg, lam2)
    if c_g > 0 and c_g >= d:
        notes.append(f"C_G = {c_g:.4g} is not small compared with the dissipation d = {d:.4g}")
        logger.warning("C_G = %.4g is not small compared with d = %.4g", c_g, d)
    if cfg.noise_kind == "diagonalSine" and not flags["H_W+"]:
        notes.append("diagonal noise without identical driver components")

    sign = None
    if en_estimate is not None:
        bound = d - (2.0 + c_g) * c_g - c_g * en_estimate
        sign = int(np.sign(bound))

    return HypothesisReport(
        flags=flags,
        components=labels,
        partition=list(partition.side) if partition is not None else None,
        c_g=c_g,
        dissipation=d,
        rate_bound_sign=sign,
        notes=notes,
    )
