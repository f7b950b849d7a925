"""Laplacian, spectral gap and Cheeger analysis of coupling graphs."""

import itertools
import logging
import math
from typing import Optional

import numpy as np
import scipy.linalg

from ..core.config import CHEEGER_MAX_N, ZERO_EIGEN_RTOL
from ..core.errors import GraphError
from ..core.models import CheegerBounds, GraphSpectrum, SignedGraph

logger = logging.getLogger(__name__)


def laplacian(g: SignedGraph) -> np.ndarray:
    """Graph Laplacian L = D - W with D the (signed) weighted degrees.

    Rows and columns sum to zero; this is -A after the diagonal of A is
    redefined as minus the row sums.
    """
    w = g.weights
    return np.diag(w.sum(axis=1)) - w


def degree_vector(g: SignedGraph) -> np.ndarray:
    """Weighted degree of every vertex."""
    return g.weights.sum(axis=1)


def max_degree(g: SignedGraph) -> float:
    """Maximal weighted vertex degree (Delta)."""
    if g.n == 0:
        return 0.0
    return float(np.max(degree_vector(g)))


def zero_tolerance(lap: np.ndarray) -> float:
    norm = float(np.linalg.norm(lap, ord=2)) if lap.size else 0.0
    return ZERO_EIGEN_RTOL * max(1.0, norm)


def spectrum(g: SignedGraph) -> GraphSpectrum:
    """Sorted Laplacian eigenvalues, Fiedler value and zero multiplicity.

    Args:
        g: coupling graph (signed input allowed; the caller interprets it)

    Returns:
        GraphSpectrum: eigenvalues in nondecreasing order, the count of zero
        eigenvalues and ``eigenvalues[component_count]`` as ``fiedler`` (0 when
        every eigenvalue is zero). Signed Laplacians may give a negative value.

    Raises:
        GraphError: if the eigensolver does not converge.
    """
    lap = laplacian(g)
    tol = zero_tolerance(lap)
    try:
        eig = scipy.linalg.eigh(lap, eigvals_only=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise GraphError(f"Laplacian eigensolver failed: {e}")

    eig = np.sort(eig)
    count = int((np.abs(eig) < tol).sum())
    fiedler = float(eig[count]) if count < g.n else 0.0

    return GraphSpectrum(
        eigenvalues=[float(x) for x in eig],
        fiedler=fiedler,
        component_count=count,
        tolerance=tol,
    )


def cheeger_constant(g: SignedGraph, max_n: Optional[int] = None) -> float:
    """Exhaustive Cheeger constant min |dX| / |X| over 0 < |X| <= n/2.

    The boundary |dX| is the total weight of edges leaving X.

    Raises:
        GraphError: for negative weights or when n exceeds the cap.
    """
    cap = CHEEGER_MAX_N if max_n is None else max_n
    if not g.is_nonnegative:
        raise GraphError("Cheeger constant needs nonnegative weights")
    n = g.n
    if n > cap:
        raise GraphError(
            f"Cheeger constant is computed by exhaustive subset search; n={n} "
            f"exceeds the cap of {cap} (the problem is NP-hard in general)"
        )
    if n < 2:
        return 0.0

    w = g.weights
    vertices = np.arange(n)
    best = math.inf
    for size in range(1, n // 2 + 1):
        for subset in itertools.combinations(range(n), size):
            inside = np.zeros(n, dtype=bool)
            inside[list(subset)] = True
            boundary = float(w[np.ix_(vertices[inside], vertices[~inside])].sum())
            best = min(best, boundary / size)
    return best


def cheeger_bounds(g: SignedGraph, max_n: Optional[int] = None) -> CheegerBounds:
    """Cheeger sandwich h^2/(2 Delta) <= lambda_2 <= 2h and h <= sqrt(l2 (2 Delta - l2))."""
    h = cheeger_constant(g, max_n=max_n)
    spec = spectrum(g)
    lam2 = spec.eigenvalues[1] if g.n > 1 else 0.0
    delta = max_degree(g)

    lower = h * h / (2.0 * delta) if delta > 0 else 0.0
    upper = 2.0 * h
    refined = math.sqrt(max(0.0, lam2 * (2.0 * delta - lam2)))

    # the refined bound fails on the complete graphs with one and three edges
    refined_applies = g.n > 3
    tol = 1e-9 * max(1.0, abs(lam2), delta)
    holds = lower <= lam2 + tol and lam2 <= upper + tol
    if refined_applies:
        holds = holds and h <= refined + tol
    if not holds:
        logger.warning(
            "Cheeger inequalities violated for %s: lower=%g lambda2=%g upper=%g h=%g refined=%g",
            g.name, lower, lam2, upper, h, refined,
        )

    return CheegerBounds(
        h=h,
        max_degree=delta,
        lower=lower,
        lambda2=lam2,
        upper=upper,
        refined_upper_on_h=refined,
        refined_applies=refined_applies,
        holds=holds,
    )
