"""Switching transform for balanced signed coupling."""

import numpy as np

from ..core.models import BalancePartition, SignedGraph, SystemConfig


def switching_transform(theta: np.ndarray, partition: BalancePartition) -> np.ndarray:
    """phi_i = theta_i + pi on side 1, theta_i on side 2."""
    return np.asarray(theta, dtype=np.float64) + partition.shifts()


def inverse_switching(phi: np.ndarray, partition: BalancePartition) -> np.ndarray:
    return np.asarray(phi, dtype=np.float64) - partition.shifts()


def switched_graph(g: SignedGraph, partition: BalancePartition) -> SignedGraph:
    """Gauge transform D A D with D = -1 on side 1 and +1 on side 2.

    For a balance partition of ``g`` this is the nonnegative coupling |a_ij|.
    """
    signs = np.where(np.asarray(partition.side) == 1, -1.0, 1.0)
    return SignedGraph(weights=signs[:, None] * g.weights * signs[None, :], name=f"|{g.name}|")


def switched_config(cfg: SystemConfig, partition: BalancePartition) -> SystemConfig:
    """Configuration of the switched system.

    The sine polynomial noise picks up the sign d_i d_k only for odd powers,
    so the noise graph is transformed for odd n_tilde and kept otherwise.
    """
    noise_graph = cfg.noise_graph
    if cfg.n_tilde % 2 == 1:
        noise_graph = switched_graph(noise_graph, partition)
    return cfg.with_updates(graph=switched_graph(cfg.graph, partition), noise_graph=noise_graph)
