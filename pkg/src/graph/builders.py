"""Named graph families and edge list I/O."""

import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import networkx as nx
import numpy as np
import pandas as pd

from ..core.errors import GraphError
from ..core.models import SignedGraph
from ..utils.parsers import parse_graph_kind

logger = logging.getLogger(__name__)


def _from_nx(graph: nx.Graph, name: str) -> SignedGraph:
    n = graph.number_of_nodes()
    w = nx.to_numpy_array(graph, nodelist=range(n), weight="weight", dtype=np.float64)
    return SignedGraph(weights=w, name=name)


def complete(n: int) -> SignedGraph:
    """All-to-all coupling with unit weights."""
    return _from_nx(nx.complete_graph(n), f"complete({n})")


def cycle(n: int) -> SignedGraph:
    if n < 3:
        # networkx turns C_1, C_2 into a loop or a single edge; keep the path
        return path(n)
    return _from_nx(nx.cycle_graph(n), f"cycle({n})")


def path(n: int) -> SignedGraph:
    return _from_nx(nx.path_graph(n), f"path({n})")


def k_neighbor(n: int, k: int) -> SignedGraph:
    """Ring lattice where every vertex couples to its k nearest neighbours on each side."""
    if k < 1:
        raise GraphError("kNeighbor needs k >= 1")
    offsets = [d for d in range(1, k + 1) if d < n]
    return _from_nx(nx.circulant_graph(n, offsets), f"kNeighbor({n},{k})")


def erdos_renyi_signed(n: int, p1: float, q1: float, seed: int = 0) -> SignedGraph:
    """Random signed graph: each pair is +1 with probability p1, -1 with q1, else absent."""
    if p1 < 0 or q1 < 0 or p1 + q1 > 1:
        raise GraphError(f"need p1, q1 >= 0 and p1 + q1 <= 1, got p1={p1}, q1={q1}")
    rng = np.random.default_rng(seed)
    u = rng.random((n, n))
    w = np.where(u < p1, 1.0, np.where(u < p1 + q1, -1.0, 0.0))
    w = np.triu(w, k=1)
    return SignedGraph(weights=w + w.T, name=f"erdosRenyiSigned({n},{p1},{q1},{seed})")


def two_block_signed(n1: int, n2: int) -> SignedGraph:
    """Balanced graph: complete positive blocks of sizes n1, n2, negative across."""
    n = n1 + n2
    w = -np.ones((n, n))
    w[:n1, :n1] = 1.0
    w[n1:, n1:] = 1.0
    np.fill_diagonal(w, 0.0)
    return SignedGraph(weights=w, name=f"twoBlockSigned({n1},{n2})")


def block_diagonal(sizes: Sequence[int]) -> SignedGraph:
    """Disjoint unit-weight cliques of the given sizes."""
    graph = nx.disjoint_union_all([nx.complete_graph(s) for s in sizes]) if sizes else nx.Graph()
    return _from_nx(graph, "blockDiagonal(" + ",".join(str(s) for s in sizes) + ")")


def zero(n: int) -> SignedGraph:
    return SignedGraph(weights=np.zeros((n, n)), name=f"zero({n})")


def load_edge_list(path_: Union[str, Path], n: Optional[int] = None) -> SignedGraph:
    """Read "i j w" lines (0-based, '#' comments) and symmetrize.

    Args:
        path_: edge list file
        n: vertex count; defaults to the largest index plus one

    Raises:
        GraphError: on malformed rows, self loops or indices outside [0, n)
    """
    p = Path(path_)
    try:
        df = pd.read_csv(p, sep=r"\s+", header=None, comment="#", names=["i", "j", "w"])
    except (OSError, pd.errors.ParserError) as e:
        raise GraphError(f"Cannot read edge list {p}: {e}")
    except pd.errors.EmptyDataError:
        df = pd.DataFrame(columns=["i", "j", "w"])

    if df.isna().any().any():
        raise GraphError(f"Edge list {p} has rows without three fields")
    try:
        i = df["i"].astype(int).to_numpy()
        j = df["j"].astype(int).to_numpy()
        w = df["w"].astype(float).to_numpy()
    except (TypeError, ValueError) as e:
        raise GraphError(f"Edge list {p} has non-numeric entries: {e}")

    size = n if n is not None else (int(max(i.max(initial=-1), j.max(initial=-1))) + 1)
    if np.any(i < 0) or np.any(j < 0) or np.any(i >= size) or np.any(j >= size):
        raise GraphError(f"Edge list {p} has vertex indices outside [0, {size})")
    if np.any(i == j):
        raise GraphError(f"Edge list {p} has self loops")

    weights = np.zeros((size, size))
    weights[i, j] = w
    weights[j, i] = w
    logger.debug("Loaded %d edges on %d vertices from %s", len(df), size, p)
    return SignedGraph(weights=weights, name=p.stem)


def save_edge_list(g: SignedGraph, path_: Union[str, Path]) -> Path:
    """Write the upper triangle as "i j w" lines with round-trip precision."""
    p = Path(path_)
    p.parent.mkdir(parents=True, exist_ok=True)
    rows = g.edges()
    df = pd.DataFrame(rows, columns=["i", "j", "w"])
    with p.open("w", encoding="utf-8") as fh:
        fh.write(f"# {g.name} n={g.n}\n")
        df.to_csv(fh, sep=" ", header=False, index=False, float_format="%.17g")
    return p


def from_kind(kind: str, n: int) -> SignedGraph:
    """Build a graph from a kind string such as ``kNeighbor:2`` or ``twoBlockSigned:4``."""
    name, args = parse_graph_kind(kind)
    try:
        if name == "complete":
            return complete(n)
        if name == "cycle":
            return cycle(n)
        if name == "path":
            return path(n)
        if name == "zero":
            return zero(n)
        if name == "kNeighbor":
            return k_neighbor(n, int(args[0]))
        if name == "erdosRenyiSigned":
            seed = int(args[2]) if len(args) > 2 else 0
            return erdos_renyi_signed(n, float(args[0]), float(args[1]), seed)
        if name == "twoBlockSigned":
            n1 = int(args[0]) if args else n // 2
            return two_block_signed(n1, n - n1)
        if name == "blockDiagonal":
            sizes = [int(s) for s in args[0].split(",")] if args else [n]
            if sum(sizes) != n:
                raise GraphError(f"block sizes {sizes} do not add up to N={n}")
            return block_diagonal(sizes)
    except (IndexError, ValueError) as e:
        raise GraphError(f"Bad arguments for graph kind '{kind}': {e}")
    raise GraphError(f"Unknown graph kind '{kind}'")
