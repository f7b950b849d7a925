"""Data models shared by the graph, noise, model, integrator and diagnostics packages."""

import math
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import DEFAULT_CP, DEFAULT_P, EDGE_THRESHOLD


NoiseKind = Literal["sinePolynomial", "diagonalSine", "custom"]
Scheme = Literal["davie", "heun"]
Scenario = Literal[
    "sync",
    "splitting",
    "nonRotInv",
    "frequencies",
    "hyperplane",
    "rateBound",
    "fbmTest",
    "graphInfo",
]


def _frozen_array(value: Any, ndim: Optional[int] = None) -> np.ndarray:
    arr = np.array(value, dtype=np.float64)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-dimensional array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


class ArrayModel(BaseModel):
    """Immutable model that carries numpy arrays."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


# ---------------------------------------------------------------------------
# graph
# ---------------------------------------------------------------------------


class SignedGraph(ArrayModel):
    """Symmetric weighted coupling structure; weights may be negative."""

    weights: np.ndarray
    name: str = "custom"

    @field_validator("weights", mode="before")
    @classmethod
    def _check_weights(cls, v: Any) -> np.ndarray:
        w = np.array(v, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weights must be a square matrix, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        scale = max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
        if not np.allclose(w, w.T, rtol=0.0, atol=1e-12 * scale):
            raise ValueError("weights must be symmetric")
        if np.any(np.abs(np.diag(w)) > EDGE_THRESHOLD):
            raise ValueError("weights must have a zero diagonal")
        w = 0.5 * (w + w.T)
        w[np.abs(w) < EDGE_THRESHOLD] = 0.0
        return _frozen_array(w)

    @property
    def n(self) -> int:
        return int(self.weights.shape[0])

    @property
    def is_nonnegative(self) -> bool:
        return bool(np.all(self.weights >= 0.0))

    @property
    def adjacency(self) -> np.ndarray:
        """Boolean edge indicator (edge iff weight is nonzero)."""
        return self.weights != 0.0

    def edges(self) -> List[Tuple[int, int, float]]:
        """List (i, j, w) for i < j with nonzero weight."""
        iu, ju = np.nonzero(np.triu(self.weights, k=1))
        return [(int(i), int(j), float(self.weights[i, j])) for i, j in zip(iu, ju)]


class GraphSpectrum(BaseModel):
    """Sorted Laplacian spectrum with Fiedler value and zero multiplicity."""

    eigenvalues: List[float]
    fiedler: float
    component_count: int = Field(..., ge=0)
    tolerance: float


class BalancePartition(BaseModel):
    """Two-camp labelling of a balanced signed graph (labels 1 and 2)."""

    side: Tuple[int, ...]

    @field_validator("side")
    @classmethod
    def _labels(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(s not in (1, 2) for s in v):
            raise ValueError("side labels must be 1 or 2")
        return v

    @property
    def n1(self) -> List[int]:
        return [i for i, s in enumerate(self.side) if s == 1]

    @property
    def n2(self) -> List[int]:
        return [i for i, s in enumerate(self.side) if s == 2]

    def shifts(self) -> np.ndarray:
        """Per-vertex phase shift: pi on side 1, 0 on side 2."""
        return np.where(np.asarray(self.side) == 1, math.pi, 0.0)


class CheegerBounds(BaseModel):
    """Cheeger constant with the spectral sandwich around lambda_2."""

    h: float
    max_degree: float
    lower: float
    lambda2: float
    upper: float
    refined_upper_on_h: float
    refined_applies: bool
    holds: bool


# ---------------------------------------------------------------------------
# noise
# ---------------------------------------------------------------------------


class FbmSpec(BaseModel):
    """Fractional Brownian driver specification on a uniform grid."""

    model_config = ConfigDict(frozen=True)

    hurst: float = Field(0.5, gt=1.0 / 3.0, le=0.5)
    m: int = Field(1, ge=1)
    dt: float = Field(..., gt=0.0)
    steps: int = Field(..., ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    identical_components: bool = False

    @property
    def horizon(self) -> float:
        return self.dt * self.steps


class RoughDriver(ArrayModel):
    """Sampled path W with per-interval second level increments.

    Attributes:
        times: grid t_k = k * dt, shape (steps + 1,)
        w: path samples, shape (steps + 1, m), w[0] == 0
        areas: second level increments over [t_k, t_{k+1}], shape (steps, m, m)
    """

    times: np.ndarray
    w: np.ndarray
    areas: np.ndarray
    dt: float = Field(..., gt=0.0)
    hurst: Optional[float] = None

    @field_validator("times", mode="before")
    @classmethod
    def _times(cls, v: Any) -> np.ndarray:
        return _frozen_array(v, ndim=1)

    @field_validator("w", mode="before")
    @classmethod
    def _path(cls, v: Any) -> np.ndarray:
        arr = np.array(v, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[:, None]
        return _frozen_array(arr, ndim=2)

    @field_validator("areas", mode="before")
    @classmethod
    def _areas(cls, v: Any) -> np.ndarray:
        return _frozen_array(v, ndim=3)

    @model_validator(mode="after")
    def _shapes(self) -> "RoughDriver":
        steps = self.w.shape[0] - 1
        m = self.w.shape[1]
        if steps < 1:
            raise ValueError("driver needs at least one interval")
        if self.times.shape != (steps + 1,):
            raise ValueError("times and path lengths differ")
        if self.areas.shape != (steps, m, m):
            raise ValueError(f"areas must have shape {(steps, m, m)}, got {self.areas.shape}")
        if np.any(self.w[0] != 0.0):
            raise ValueError("driver path must start at 0")
        return self

    @property
    def steps(self) -> int:
        return int(self.w.shape[0] - 1)

    @property
    def m(self) -> int:
        return int(self.w.shape[1])

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.w, axis=0)


class KolmogorovReport(BaseModel):
    """Empirical moment scaling of a driver family over dyadic intervals."""

    p: float
    q: float
    hurst: float
    scales: List[float]
    moments: List[float]
    slope: float
    intercept: float
    passed: bool
    samples: int


# ---------------------------------------------------------------------------
# roughpath
# ---------------------------------------------------------------------------


class PVarParams(BaseModel):
    """Variation exponents: p for the path, q = p / 2 for the second level."""

    model_config = ConfigDict(frozen=True)

    p: float = Field(DEFAULT_P, ge=2.0)

    @property
    def q(self) -> float:
        return self.p / 2.0


class GreedyPartition(BaseModel):
    """Greedy times of a driver for a given threshold."""

    taus: List[float]
    indices: List[int]
    count: int = Field(..., ge=1)
    gamma: float = Field(..., gt=0.0)
    cp: float = DEFAULT_CP
    seminorms: List[float] = Field(default_factory=list)


class CountEstimate(BaseModel):
    """Monte Carlo mean of greedy counts on [0, 1]."""

    mean: float
    stderr: float
    counts: List[int]
    gamma: float
    trials: int
    seminorms: List[float] = Field(default_factory=list)


class MomentTail(BaseModel):
    """Empirical moments E N^k of greedy counts (reported only)."""

    exponent: float
    moment: float
    max_count: int
    quantiles: Dict[str, float]


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------


class SystemConfig(ArrayModel):
    """Full parameterisation of the rough Kuramoto system."""

    K: float = Field(..., gt=0.0)
    graph: SignedGraph
    noise_graph: SignedGraph
    sigma: float = Field(0.0, ge=0.0)
    n_tilde: int = Field(1, ge=1)
    natural_freqs: np.ndarray
    hurst: float = Field(0.5, gt=1.0 / 3.0, le=0.5)
    driver_dim: int = Field(1, ge=1)
    identical_components: bool = False
    noise_kind: NoiseKind = "sinePolynomial"
    horizon: float = Field(..., gt=0.0)
    dt: float = Field(..., gt=0.0)
    seed: int = Field(0, ge=0)
    delta: float = Field(math.pi / 4, ge=0.0, lt=math.pi / 2)
    custom_noise: Optional[Any] = Field(None, exclude=True)

    @field_validator("natural_freqs", mode="before")
    @classmethod
    def _freqs(cls, v: Any) -> np.ndarray:
        return _frozen_array(v, ndim=1)

    @model_validator(mode="after")
    def _consistent(self) -> "SystemConfig":
        n = self.graph.n
        if self.noise_graph.n != n or self.natural_freqs.shape[0] != n:
            raise ValueError(
                f"graph ({n}), noise graph ({self.noise_graph.n}) and natural "
                f"frequencies ({self.natural_freqs.shape[0]}) must agree on N"
            )
        ratio = self.horizon / self.dt
        if abs(ratio - round(ratio)) > 1e-6 * max(1.0, ratio):
            raise ValueError("horizon must be an integer multiple of dt")
        if self.noise_kind == "diagonalSine" and self.driver_dim not in (1, n):
            raise ValueError("diagonalSine needs driver_dim 1 or N")
        if self.noise_kind == "custom" and self.custom_noise is None:
            raise ValueError("noise_kind 'custom' requires custom_noise")
        return self

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def steps(self) -> int:
        return int(round(self.horizon / self.dt))

    @property
    def fbm(self) -> FbmSpec:
        return FbmSpec(
            hurst=self.hurst,
            m=self.driver_dim,
            dt=self.dt,
            steps=self.steps,
            seed=self.seed,
            identical_components=self.identical_components,
        )

    def with_updates(self, **changes: Any) -> "SystemConfig":
        """Return a re-validated copy with some fields replaced."""
        data = {name: getattr(self, name) for name in type(self).model_fields}
        data.update(changes)
        return type(self)(**data)


class HypothesisReport(BaseModel):
    """Which named structural hypotheses a configuration satisfies."""

    flags: Dict[str, bool]
    components: List[int]
    partition: Optional[List[int]] = None
    c_g: float
    dissipation: float
    rate_bound_sign: Optional[int] = None
    notes: List[str] = Field(default_factory=list)


# ---------------------------------------------------------------------------
# integrator
# ---------------------------------------------------------------------------


class Trajectory(ArrayModel):
    """Time grid, phases, mean phase and optional frequency system."""

    times: np.ndarray
    theta: np.ndarray
    mean_phase: np.ndarray
    varpi: Optional[np.ndarray] = None
    scheme: Scheme = "davie"
    config: Optional[SystemConfig] = None
    reduced: bool = False

    @field_validator("times", "mean_phase", mode="before")
    @classmethod
    def _vec(cls, v: Any) -> np.ndarray:
        return _frozen_array(v, ndim=1)

    @field_validator("theta", mode="before")
    @classmethod
    def _mat(cls, v: Any) -> np.ndarray:
        return _frozen_array(v, ndim=2)

    @field_validator("varpi", mode="before")
    @classmethod
    def _opt_mat(cls, v: Any) -> Optional[np.ndarray]:
        return None if v is None else _frozen_array(v, ndim=2)

    @property
    def n(self) -> int:
        return int(self.theta.shape[1])

    @property
    def theta_hat(self) -> np.ndarray:
        return self.theta - self.mean_phase[:, None]


class ConvergenceReport(BaseModel):
    """Empirical strong order from terminal errors on dyadic refinements."""

    scheme: Scheme
    dts: List[float]
    errors: List[float]
    order: Optional[float]
    reference: Literal["finest", "exact"] = "finest"


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------


class DecayFit(BaseModel):
    """Least squares fit of -log ||x(t)|| on a tail window."""

    rate: Optional[float]
    intercept: Optional[float]
    r_squared: Optional[float]
    window: Tuple[float, float]
    points: int
    decaying: bool


class SyncReport(BaseModel):
    """Synchronisation summary of one simulated run."""

    fitted_rate: Optional[float]
    r_squared: Optional[float]
    tail_window: Tuple[float, float]
    terminal_deviation: float
    conservation_residual: float
    theta_infinity: Optional[float]
    delta_sup: float
    verdicts: Dict[str, bool]
    notes: List[str] = Field(default_factory=list)


class LyapunovReport(BaseModel):
    """Worst sampled dissipation margin <grad V, f> + d |x| (must be <= 0)."""

    worst_margin: float
    d: float
    c_two_delta: float
    lambda2: float
    samples: int
    violations: int
    tolerance: float


class RateBoundReport(BaseModel):
    """Assembled upper bound on the admissible convergence rate."""

    d: float = Field(..., ge=0.0)
    c_delta: float
    lambda2: float
    c_g: float
    en_estimate: float
    bound: float
    cp: float
    positive: bool
    K: float
    N: int
    delta: float


class BasinReport(BaseModel):
    """Truncated basin radius r(omega) and the minimising index."""

    radius: float
    minimizing_n: int
    eps: float
    lam: float
    eta: Optional[float]
    l_f: Optional[float]
    counts: List[int] = Field(default_factory=list)
    note: Optional[str] = None


class ThetaInfinityReport(BaseModel):
    """Limit mean phase reconstructed by the compensated rough integral."""

    estimate: float
    theta0: float
    terminal_mean: float
    increments: List[float]


class SplittingReport(BaseModel):
    """Coherence of the switched phases at the end of a run."""

    verdict: bool
    max_deviation: float
    side_deviations: Dict[str, float]
    tolerance: float


class FrequencySyncReport(BaseModel):
    """Frequency synchronisation measurement for the coupled system."""

    delta_max: float
    hypothesis_holds: bool
    fitted_rate: Optional[float]
    r_squared: Optional[float]
    rate_floor: Optional[float]
    terminal_spread: float
    verdict: bool


class SmoothedFrequencies(ArrayModel):
    """Finite difference frequencies with moving averages per window."""

    times: np.ndarray
    raw: np.ndarray
    smoothed: Dict[float, np.ndarray]
    mean_raw: np.ndarray
    mean_smoothed: Dict[float, np.ndarray]


class OrderParameter(ArrayModel):
    """Kuramoto order parameter r(t) e^{i psi(t)}."""

    r: np.ndarray
    psi: np.ndarray


# ---------------------------------------------------------------------------
# cli
# ---------------------------------------------------------------------------


class ExperimentPlan(BaseModel):
    """Base configuration, scenario and parameter sweeps for one experiment."""

    base: Dict[str, Any]
    scenario: Scenario = "sync"
    sweeps: Dict[str, List[Any]] = Field(default_factory=dict)
    init_spread: float = Field(0.9, gt=0.0, le=2.0)
    init_explicit: Optional[List[float]] = None
    scheme: Scheme = "davie"
    output_dir: str = "./runs"
    with_frequencies: bool = False
    init_freq_spread: float = Field(0.0, ge=0.0)
    output_format: Literal["csv", "json"] = "csv"
    base_dir: Optional[str] = None


class RunRecord(BaseModel):
    """One attempted run in the sweep index."""

    run_id: str
    params: Dict[str, Any]
    status: Literal["ok", "failed"]
    error: Optional[str] = None
    artifacts: List[str] = Field(default_factory=list)
    verdicts: Dict[str, bool] = Field(default_factory=dict)
    fitted_rate: Optional[float] = None
    terminal_deviation: Optional[float] = None


class SweepSummary(BaseModel):
    """Aggregate statistics of a seed sweep."""

    runs: int
    succeeded: int
    failed: int
    synchronized: int
    success_fraction: float
    median_rate: Optional[float]
    rate_iqr: Optional[Tuple[float, float]]
    median_deviation: Optional[float]
    deviation_iqr: Optional[Tuple[float, float]]
