"""Compensated Riemann sums against a rough driver."""

import logging
from typing import Optional, Tuple

import numpy as np

from ..core.errors import RoughPathParameterError
from ..core.models import RoughDriver
from .greedy import grid_index

logger = logging.getLogger(__name__)


def _shape_inputs(y: np.ndarray, y_prime: np.ndarray, driver: RoughDriver) -> Tuple[np.ndarray, np.ndarray]:
    points, m = driver.steps + 1, driver.m
    y = np.asarray(y, dtype=np.float64)
    yp = np.asarray(y_prime, dtype=np.float64)
    if y.ndim == 1 and m == 1:
        y = y[:, None]
    if yp.ndim == 1 and m == 1:
        yp = yp[:, None, None]
    if y.shape != (points, m):
        raise RoughPathParameterError(f"Y has shape {y.shape}, driver grid needs {(points, m)}")
    if yp.shape != (points, m, m):
        raise RoughPathParameterError(f"Y' has shape {yp.shape}, driver grid needs {(points, m, m)}")
    return y, yp


def integral_terms(y: np.ndarray, y_prime: np.ndarray, driver: RoughDriver) -> np.ndarray:
    """Per fine interval Y_u W_{u,v} + Y'_u A_{u,v}, shape (steps,).

    Y'[k, j, l] is the derivative of the j-th component in the l-th driver
    direction and pairs with A[l, j].
    """
    y, yp = _shape_inputs(y, y_prime, driver)
    first = np.einsum("kj,kj->k", y[:-1], driver.increments)
    second = np.einsum("kjl,klj->k", yp[:-1], driver.areas)
    return first + second


def rough_integral(
    y: np.ndarray,
    y_prime: np.ndarray,
    driver: RoughDriver,
    a: float = 0.0,
    b: Optional[float] = None,
) -> float:
    """Integral of Y against the driver over [a, b] with Gubinelli derivative Y'.

    Args:
        y: integrand on the driver grid, shape (steps + 1, m); 1-D when m = 1
        y_prime: Gubinelli derivative, shape (steps + 1, m, m); 1-D when m = 1
        driver: rough driver the integrand was sampled on
        a, b: grid times, default the whole grid

    Raises:
        RoughPathParameterError: if the shapes do not match the driver grid
    """
    lo = grid_index(driver, a)
    hi = driver.steps if b is None else grid_index(driver, b)
    if hi < lo:
        raise RoughPathParameterError(f"empty interval [{a}, {b}]")
    terms = integral_terms(y, y_prime, driver)
    return float(terms[lo:hi].sum())
