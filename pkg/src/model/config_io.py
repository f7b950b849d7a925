"""System configuration files and initial phase generators."""

import logging
import math
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Union

import numpy as np
import yaml
from pydantic import ValidationError

from ..core.errors import ConfigurationError, GraphError
from ..core.models import SignedGraph, SystemConfig
from ..graph.builders import from_kind, load_edge_list
from ..utils.parsers import parse_angle, parse_bool, parse_float_list

logger = logging.getLogger(__name__)

INIT_STREAM = 7919

# flat file key -> SystemConfig field
_SCALAR_KEYS = {
    "K": ("K", float),
    "sigma": ("sigma", float),
    "nTilde": ("n_tilde", int),
    "hurst": ("hurst", float),
    "dt": ("dt", parse_angle),
    "T": ("horizon", float),
    "seed": ("seed", int),
    "delta": ("delta", parse_angle),
    "noiseKind": ("noise_kind", str),
    "m": ("driver_dim", int),
    "driverDim": ("driver_dim", int),
}

KNOWN_KEYS = set(_SCALAR_KEYS) | {
    "N",
    "graph.kind",
    "graph.file",
    "noiseGraph.kind",
    "noiseGraph.file",
    "freqs",
    "freqs.identical",
    "identicalComponents",
}


def flatten_mapping(data: Mapping[str, Any], prefix: str = "") -> Dict[str, Any]:
    """Turn nested YAML mappings into dotted keys (``graph: {kind: x}`` -> ``graph.kind``)."""
    flat: Dict[str, Any] = {}
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(flatten_mapping(value, f"{name}."))
        else:
            flat[name] = value
    return flat


def _graph(flat: Mapping[str, Any], prefix: str, n: Optional[int], base_dir: Path) -> Optional[SignedGraph]:
    if f"{prefix}.file" in flat:
        path = Path(str(flat[f"{prefix}.file"]))
        if not path.is_absolute():
            path = base_dir / path
        return load_edge_list(path, n)
    if f"{prefix}.kind" in flat:
        if n is None:
            raise ConfigurationError(f"{prefix}.kind needs N")
        return from_kind(str(flat[f"{prefix}.kind"]), n)
    return None


def default_coupling(graph: SignedGraph) -> float:
    """K = 1 for all-to-all coupling, K = N otherwise."""
    n = graph.n
    complete = np.all(graph.weights[~np.eye(n, dtype=bool)] == 1.0) if n > 1 else True
    return 1.0 if complete else float(n)


def system_config_from_mapping(data: Mapping[str, Any], base_dir: Union[str, Path, None] = None) -> SystemConfig:
    """Build a SystemConfig from flat (or nested) configuration keys.

    Raises:
        ConfigurationError: on unknown keys, missing values or invalid parameters
    """
    flat = flatten_mapping(data)
    unknown = sorted(set(flat) - KNOWN_KEYS)
    if unknown:
        raise ConfigurationError(f"Unknown configuration keys: {unknown}")
    root = Path(base_dir) if base_dir is not None else Path(".")

    try:
        n = int(flat["N"]) if "N" in flat else None
        graph = _graph(flat, "graph", n, root)
        if graph is None:
            raise ConfigurationError("configuration needs graph.kind or graph.file")
        n = graph.n
        noise_graph = _graph(flat, "noiseGraph", n, root) or graph

        fields: Dict[str, Any] = {"graph": graph, "noise_graph": noise_graph}
        for key, (field, conv) in _SCALAR_KEYS.items():
            if key in flat and flat[key] is not None:
                fields[field] = conv(flat[key])

        if "freqs" in flat:
            fields["natural_freqs"] = parse_float_list(flat["freqs"])
        elif "freqs.identical" in flat:
            fields["natural_freqs"] = [parse_angle(flat["freqs.identical"])] * n
        else:
            fields["natural_freqs"] = [0.0] * n

        if "identicalComponents" in flat:
            flag = parse_bool(flat["identicalComponents"])
            if flag is None:
                raise ConfigurationError(f"identicalComponents must be a boolean, got {flat['identicalComponents']!r}")
            fields["identical_components"] = flag

        fields.setdefault("K", default_coupling(graph))
        return SystemConfig(**fields)
    except (ValidationError, ValueError, GraphError) as e:
        raise ConfigurationError(f"Invalid system configuration: {e}")


def load_system_config(path: Union[str, Path]) -> SystemConfig:
    """Read a YAML configuration file; relative graph files resolve next to it."""
    p = Path(path)
    try:
        with p.open("r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigurationError(f"Cannot read configuration {p}: {e}")
    if not isinstance(data, Mapping):
        raise ConfigurationError(f"{p}: expected key-value pairs at the top level")
    logger.debug("Loaded configuration keys %s from %s", sorted(data), p)
    return system_config_from_mapping(data, base_dir=p.parent)


def config_to_mapping(cfg: SystemConfig) -> Dict[str, Any]:
    """Flat JSON-friendly view of a configuration (graphs by name and weights)."""
    return {
        "K": cfg.K,
        "N": cfg.n,
        "sigma": cfg.sigma,
        "nTilde": cfg.n_tilde,
        "hurst": cfg.hurst,
        "dt": cfg.dt,
        "T": cfg.horizon,
        "seed": cfg.seed,
        "delta": cfg.delta,
        "noiseKind": cfg.noise_kind,
        "m": cfg.driver_dim,
        "identicalComponents": cfg.identical_components,
        "graph": cfg.graph.name,
        "noiseGraph": cfg.noise_graph.name,
        "freqs": [float(x) for x in cfg.natural_freqs],
    }


def initial_phases(n: int, spread: float, seed: int, explicit: Optional[Sequence[float]] = None) -> np.ndarray:
    """Uniform phases on [0, spread * pi], or the explicit list when given.

    The draw uses its own stream derived from ``seed`` so it never overlaps the
    driver sample of the same seed.
    """
    if explicit is not None:
        theta = np.asarray(explicit, dtype=np.float64)
        if theta.shape != (n,):
            raise ConfigurationError(f"explicit initial phases have length {theta.size}, expected {n}")
        return theta
    rng = np.random.default_rng(np.random.SeedSequence([seed, INIT_STREAM]))
    return rng.uniform(0.0, spread * math.pi, size=n)


def antipodal(n: int, theta_star: float = 0.0, split: Optional[int] = None) -> np.ndarray:
    """Two clusters at theta_star and theta_star + pi (first ``split`` oscillators at theta_star)."""
    k = n // 2 if split is None else split
    theta = np.full(n, float(theta_star))
    theta[k:] += math.pi
    return theta

