"""One-step schemes for rough differential equations dy = f(y) dt + G(y) dW."""

from typing import Optional, Protocol

import numpy as np

from ..core.models import RoughDriver, SystemConfig
from ..model.vector_fields import (
    frequency_drift,
    kuramoto_drift,
    noise_jacobian,
    noise_matrix,
    tilde_G,
)


class VectorField(Protocol):
    """Drift f(y) (d,), noise G(y) (d, m) and its derivative DG(y) (d, m, d)."""

    def drift(self, y: np.ndarray) -> np.ndarray: ...

    def noise(self, y: np.ndarray) -> np.ndarray: ...

    def jacobian(self, y: np.ndarray) -> np.ndarray: ...


class PhaseField:
    """Rough Kuramoto phases; ``reduced`` gives the zero-mean system."""

    def __init__(self, cfg: SystemConfig, reduced: bool = False):
        self.cfg = cfg
        self.reduced = reduced

    def drift(self, y: np.ndarray) -> np.ndarray:
        f = kuramoto_drift(y, self.cfg)
        return f - f.mean() if self.reduced else f

    def noise(self, y: np.ndarray) -> np.ndarray:
        g = noise_matrix(y, self.cfg)
        return tilde_G(g) if self.reduced else g

    def jacobian(self, y: np.ndarray) -> np.ndarray:
        dg = noise_jacobian(y, self.cfg)
        return dg - dg.mean(axis=0, keepdims=True) if self.reduced else dg


class FrequencyField:
    """Frequency system driven by the phases of the current step."""

    def __init__(self, cfg: SystemConfig, theta: Optional[np.ndarray] = None):
        self.cfg = cfg
        self.theta = np.zeros(cfg.n) if theta is None else theta

    def drift(self, y: np.ndarray) -> np.ndarray:
        return frequency_drift(y, self.theta, self.cfg)

    def noise(self, y: np.ndarray) -> np.ndarray:
        return noise_matrix(y, self.cfg)

    def jacobian(self, y: np.ndarray) -> np.ndarray:
        return noise_jacobian(y, self.cfg)


def davie_update(y: np.ndarray, field: VectorField, dw: np.ndarray, area: np.ndarray, dt: float) -> np.ndarray:
    """y + f dt + G dW + sum_{j,l} (DG_{.j} G_{.l}) A[l, j]."""
    g = field.noise(y)
    correction = np.einsum("ijn,nl,lj->i", field.jacobian(y), g, area)
    return y + field.drift(y) * dt + g @ dw + correction


def heun_update(y: np.ndarray, field: VectorField, dw: np.ndarray, dt: float) -> np.ndarray:
    """Predictor-corrector step; does not use the second level."""
    f0 = field.drift(y)
    g0 = field.noise(y)
    pred = y + f0 * dt + g0 @ dw
    return y + 0.5 * (f0 + field.drift(pred)) * dt + 0.5 * (g0 + field.noise(pred)) @ dw


def step_davie(y: np.ndarray, k: int, cfg: SystemConfig, driver: RoughDriver, reduced: bool = False) -> np.ndarray:
    """Second order rough Taylor step over the k-th grid interval."""
    return davie_update(np.asarray(y, dtype=np.float64), PhaseField(cfg, reduced), driver.w[k + 1] - driver.w[k], driver.areas[k], driver.dt)


def step_heun(y: np.ndarray, k: int, cfg: SystemConfig, driver: RoughDriver, reduced: bool = False) -> np.ndarray:
    """Heun step over the k-th grid interval."""
    return heun_update(np.asarray(y, dtype=np.float64), PhaseField(cfg, reduced), driver.w[k + 1] - driver.w[k], driver.dt)


def advance(y: np.ndarray, field: VectorField, driver: RoughDriver, k: int, scheme: str) -> np.ndarray:
    dw = driver.w[k + 1] - driver.w[k]
    if scheme == "davie":
        return davie_update(y, field, dw, driver.areas[k], driver.dt)
    if scheme == "heun":
        return heun_update(y, field, dw, driver.dt)
    raise ValueError(f"unknown scheme '{scheme}'")
