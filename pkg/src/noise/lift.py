"""Geometric level-2 lift of grid paths and operations on rough drivers."""

import logging
import struct
from pathlib import Path
from typing import Optional, Union

import numpy as np

from ..core.errors import RoughPathParameterError
from ..core.models import FbmSpec, RoughDriver
from .fbm import sample_fbm

logger = logging.getLogger(__name__)

DRIVER_MAGIC = b"RKMW"
DRIVER_VERSION = 1
_HEADER = struct.Struct("<4sIIIdd")


def lift_path(path: np.ndarray, dt: float, hurst: Optional[float] = None) -> RoughDriver:
    """Piecewise-linear lift: the area over each grid interval is 1/2 dW (x) dW.

    Args:
        path: samples of shape (steps + 1, m) or (steps + 1,), starting at 0
        dt: grid step
        hurst: recorded on the driver when known

    Returns:
        RoughDriver on the grid k * dt
    """
    w = np.asarray(path, dtype=np.float64)
    if w.ndim == 1:
        w = w[:, None]
    dw = np.diff(w, axis=0)
    areas = 0.5 * np.einsum("ki,kj->kij", dw, dw)
    times = dt * np.arange(w.shape[0])
    return RoughDriver(times=times, w=w, areas=areas, dt=dt, hurst=hurst)


def sample_driver(spec: FbmSpec) -> RoughDriver:
    """Sample an fBm path from ``spec`` and lift it."""
    return lift_path(sample_fbm(spec), spec.dt, spec.hurst)


def chen_compose(area_su: np.ndarray, area_ut: np.ndarray, w_su: np.ndarray, w_ut: np.ndarray) -> np.ndarray:
    """Second level over [s, t] from the adjacent intervals [s, u] and [u, t]."""
    return np.asarray(area_su) + np.asarray(area_ut) + np.multiply.outer(np.asarray(w_su), np.asarray(w_ut))


def _check_indices(driver: RoughDriver, i: int, j: int) -> None:
    if not 0 <= i <= j <= driver.steps:
        raise RoughPathParameterError(f"grid interval [{i}, {j}] outside [0, {driver.steps}]")


def interval_increment(driver: RoughDriver, i: int, j: int) -> np.ndarray:
    """W_{t_i, t_j}."""
    _check_indices(driver, i, j)
    return driver.w[j] - driver.w[i]


def interval_area(driver: RoughDriver, i: int, j: int) -> np.ndarray:
    """Second level over [t_i, t_j], folding the fine intervals with Chen's relation."""
    _check_indices(driver, i, j)
    m = driver.m
    if i == j:
        return np.zeros((m, m))
    local = driver.w[i:j] - driver.w[i]
    dw = np.diff(driver.w[i:j + 1], axis=0)
    return driver.areas[i:j].sum(axis=0) + np.einsum("ki,kj->ij", local, dw)


def cumulative_areas(driver: RoughDriver) -> np.ndarray:
    """Second level over [0, t_k] for every k, shape (steps + 1, m, m)."""
    cross = np.einsum("ki,kj->kij", driver.w[:-1], driver.increments)
    out = np.zeros((driver.steps + 1, driver.m, driver.m))
    np.cumsum(driver.areas + cross, axis=0, out=out[1:])
    return out


def areas_from(driver: RoughDriver, i: int, cumulative: Optional[np.ndarray] = None) -> np.ndarray:
    """Second level over [t_i, t_j] for every j >= i, shape (steps + 1 - i, m, m).

    Uses A(s,t) = A(0,t) - A(0,s) - W_{0,s} (x) W_{s,t}.
    """
    cum = cumulative_areas(driver) if cumulative is None else cumulative
    w_i = driver.w[i]
    return cum[i:] - cum[i] - np.einsum("a,kb->kab", w_i, driver.w[i:] - w_i)


def restrict(driver: RoughDriver, factor: int) -> RoughDriver:
    """Coarser driver on every ``factor``-th grid point; areas aggregated by Chen."""
    if factor < 1 or driver.steps % factor:
        raise RoughPathParameterError(f"factor {factor} does not divide {driver.steps} steps")
    if factor == 1:
        return driver
    coarse_steps = driver.steps // factor
    m = driver.m
    start = driver.w[:-1:factor]
    local = driver.w[:-1] - np.repeat(start, factor, axis=0)
    cross = np.einsum("ki,kj->kij", local, driver.increments)
    areas = (driver.areas + cross).reshape(coarse_steps, factor, m, m).sum(axis=1)
    return RoughDriver(
        times=driver.times[::factor],
        w=driver.w[::factor],
        areas=areas,
        dt=driver.dt * factor,
        hurst=driver.hurst,
    )


def dump_driver(driver: RoughDriver, path: Union[str, Path]) -> Path:
    """Binary dump: header then little-endian float64 path and areas, row-major."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    hurst = float("nan") if driver.hurst is None else float(driver.hurst)
    header = _HEADER.pack(DRIVER_MAGIC, DRIVER_VERSION, driver.m, driver.steps, driver.dt, hurst)
    with p.open("wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(driver.w, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(driver.areas, dtype="<f8").tobytes())
    return p


def load_driver(path: Union[str, Path]) -> RoughDriver:
    """Read a driver written by :func:`dump_driver`.

    Raises:
        RoughPathParameterError: on a bad magic, unknown version or truncated file
    """
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise RoughPathParameterError(f"{path}: file too short for a driver header")
    magic, version, m, steps, dt, hurst = _HEADER.unpack_from(data)
    if magic != DRIVER_MAGIC:
        raise RoughPathParameterError(f"{path}: bad magic {magic!r}")
    if version != DRIVER_VERSION:
        raise RoughPathParameterError(f"{path}: unsupported driver version {version}")

    n_w = (steps + 1) * m
    n_a = steps * m * m
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    if body.size != n_w + n_a:
        raise RoughPathParameterError(f"{path}: expected {n_w + n_a} values, found {body.size}")
    w = body[:n_w].reshape(steps + 1, m)
    areas = body[n_w:].reshape(steps, m, m)
    return RoughDriver(
        times=dt * np.arange(steps + 1),
        w=w,
        areas=areas,
        dt=dt,
        hurst=None if np.isnan(hurst) else hurst,
    )
