"""Connectivity and signed balance of coupling graphs."""

import logging
from collections import deque
from typing import List, Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _csgraph_components

from ..core.models import BalancePartition, SignedGraph

logger = logging.getLogger(__name__)


def connected_components(g: SignedGraph) -> List[int]:
    """Per-vertex component labels, numbered by first appearance.

    An edge is present iff its weight is nonzero; the sign is ignored.
    """
    if g.n == 0:
        return []
    _, labels = _csgraph_components(csr_matrix(g.adjacency.astype(np.int8)), directed=False)

    # relabel so vertex 0 is in component 0, the next new one in 1, ...
    mapping = {}
    out = []
    for lab in labels:
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out.append(mapping[lab])
    return out


def component_count(g: SignedGraph) -> int:
    return len(set(connected_components(g)))


def is_connected(g: SignedGraph) -> bool:
    return g.n > 0 and component_count(g) == 1


def balance_partition(g: SignedGraph) -> Optional[BalancePartition]:
    """Two camps such that positive edges stay inside and negative edges cross.

    Breadth first search from the lowest unvisited vertex of every component,
    which starts on side 2. A positive edge copies the label, a negative edge
    flips it. Returns None as soon as an edge contradicts the labelling, so an
    all-positive graph comes back with every vertex on side 2.
    """
    n = g.n
    w = g.weights
    side = [0] * n

    for root in range(n):
        if side[root]:
            continue
        side[root] = 2
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in np.flatnonzero(w[u]):
                want = side[u] if w[u, v] > 0 else 3 - side[u]
                if side[v] == 0:
                    side[v] = want
                    queue.append(int(v))
                elif side[v] != want:
                    logger.debug("Edge (%d, %d) breaks balance of %s", u, v, g.name)
                    return None

    return BalancePartition(side=tuple(side))


def is_balanced(g: SignedGraph) -> bool:
    return balance_partition(g) is not None


def components_balanced(g: SignedGraph) -> bool:
    """True when every connected component is balanced on its own.

    With the BFS above this coincides with balance of the whole graph, since
    components never share edges; kept as a named check for hypothesis reports.
    """
    labels = connected_components(g)
    for comp in sorted(set(labels)):
        idx = [i for i, lab in enumerate(labels) if lab == comp]
        sub = SignedGraph(weights=g.weights[np.ix_(idx, idx)], name=f"{g.name}[{comp}]")
        if balance_partition(sub) is None:
            return False
    return True
