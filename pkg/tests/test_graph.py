"""Tests for graph construction, spectra, connectivity and balance."""

import itertools
import math

import numpy as np
import pytest

from src.core.errors import GraphError
from src.core.models import SignedGraph
from src.graph import (
    balance_partition,
    block_diagonal,
    cheeger_bounds,
    cheeger_constant,
    complete,
    component_count,
    components_balanced,
    connected_components,
    cycle,
    erdos_renyi_signed,
    from_kind,
    is_balanced,
    is_connected,
    k_neighbor,
    laplacian,
    load_edge_list,
    max_degree,
    path,
    save_edge_list,
    spectrum,
    two_block_signed,
    zero,
)


class TestSignedGraph:
    """Validation of the graph model."""

    def test_rejects_asymmetric_weights(self):
        """Verify an asymmetric matrix is refused."""
        with pytest.raises(ValueError):
            SignedGraph(weights=[[0.0, 1.0], [0.0, 0.0]])

    def test_rejects_self_loops(self):
        """Verify a nonzero diagonal is refused."""
        with pytest.raises(ValueError):
            SignedGraph(weights=[[1.0, 0.0], [0.0, 0.0]])

    def test_edges_lists_upper_triangle(self):
        """Verify edges() returns each undirected edge once with its weight."""
        g = two_block_signed(1, 2)
        assert g.edges() == [(0, 1, -1.0), (0, 2, -1.0), (1, 2, 1.0)]


class TestSpectrum:
    """Laplacian spectra and Fiedler values of named families."""

    def test_laplacian_rows_sum_to_zero(self):
        """Verify L = D - W has zero row sums."""
        lap = laplacian(erdos_renyi_signed(7, 0.4, 0.2, seed=3))
        assert np.allclose(lap.sum(axis=1), 0.0, atol=1e-12)

    def test_complete_graph_gap_is_n(self):
        """Verify lambda_2 of K_N equals N."""
        assert spectrum(complete(10)).fiedler == pytest.approx(10.0, abs=1e-10)

    def test_cycle_and_path_gaps(self):
        """Verify the closed forms 2 - 2 cos(2 pi / n) and 2 - 2 cos(pi / n)."""
        n = 9
        assert spectrum(cycle(n)).fiedler == pytest.approx(2 - 2 * math.cos(2 * math.pi / n), abs=1e-10)
        assert spectrum(path(n)).fiedler == pytest.approx(2 - 2 * math.cos(math.pi / n), abs=1e-10)

    def test_zero_graph_has_no_gap(self):
        """Verify the empty coupling has only zero eigenvalues and Fiedler value 0."""
        spec = spectrum(zero(4))
        assert spec.component_count == 4
        assert spec.fiedler == 0.0

    def test_disconnected_counts_components(self):
        """Verify the zero multiplicity equals the number of components."""
        spec = spectrum(block_diagonal([3, 5]))
        assert spec.component_count == 2
        assert spec.eigenvalues[1] == pytest.approx(0.0, abs=1e-9)
        assert spec.fiedler == pytest.approx(3.0, abs=1e-9)

    def test_k_neighbor_degrees(self):
        """Verify every vertex of the ring lattice has degree 2k."""
        g = k_neighbor(10, 2)
        assert np.allclose(g.weights.sum(axis=1), 4.0)
        assert max_degree(g) == 4.0

    def test_fiedler_is_eigenvalue_after_zero_block(self):
        """Verify fiedler = eigenvalues[component_count] for signed, connected and disconnected graphs."""
        for g in (two_block_signed(2, 2), cycle(5), block_diagonal([2, 4]), erdos_renyi_signed(6, 0.4, 0.3, seed=8)):
            spec = spectrum(g)
            assert spec.component_count < g.n
            assert spec.fiedler == spec.eigenvalues[spec.component_count]

    def test_permutation_invariance(self):
        """Verify relabelling the vertices leaves the spectrum unchanged."""
        rng = np.random.default_rng(21)
        for _ in range(50):
            n = int(rng.integers(2, 9))
            w = np.triu(rng.uniform(-2.0, 2.0, size=(n, n)) * (rng.random((n, n)) < 0.6), k=1)
            w = w + w.T
            perm = rng.permutation(n)
            original = spectrum(SignedGraph(weights=w))
            relabelled = spectrum(SignedGraph(weights=w[perm][:, perm]))
            assert np.allclose(original.eigenvalues, relabelled.eigenvalues, rtol=0.0, atol=1e-9)


class TestCheeger:
    """Exhaustive Cheeger constant and the spectral sandwich."""

    def test_complete_graph_constant(self):
        """Verify h(K_4) = 2 and the bounds hold with equality at the top."""
        bounds = cheeger_bounds(complete(4))
        assert bounds.h == pytest.approx(2.0)
        assert bounds.upper == pytest.approx(bounds.lambda2)
        assert bounds.holds

    def test_refused_above_cap(self):
        """Verify the exhaustive search refuses graphs above the cap."""
        with pytest.raises(GraphError):
            cheeger_constant(complete(6), max_n=5)

    def test_refused_for_signed_graph(self):
        """Verify negative weights are refused."""
        with pytest.raises(GraphError):
            cheeger_constant(two_block_signed(2, 2))

    def test_refined_bound_skipped_on_triangle(self):
        """Verify the refined bound is not applied to K_3."""
        bounds = cheeger_bounds(complete(3))
        assert not bounds.refined_applies
        assert bounds.holds

    def test_four_cycle(self):
        """Verify h(C_4) = 1 with lower bound 1/4, lambda_2 = 2 and upper bound 2."""
        g = cycle(4)
        assert cheeger_constant(g) == pytest.approx(1.0)
        bounds = cheeger_bounds(g)
        assert bounds.lower == pytest.approx(0.25)
        assert bounds.lambda2 == pytest.approx(2.0)
        assert bounds.upper == pytest.approx(2.0)
        assert bounds.holds

    def test_single_edge(self):
        """Verify P_2 has h = 1 and the sandwich (1/2, 2, 2)."""
        bounds = cheeger_bounds(path(2))
        assert spectrum(path(2)).eigenvalues == pytest.approx([0.0, 2.0], abs=1e-12)
        assert bounds.h == pytest.approx(1.0)
        assert (bounds.lower, bounds.lambda2, bounds.upper) == pytest.approx((0.5, 2.0, 2.0))
        assert bounds.holds

    @pytest.mark.slow
    def test_sandwich_on_random_graphs(self):
        """Verify h^2/(2 Delta) <= lambda_2 <= 2h and h <= sqrt(l2 (2 Delta - l2)) on 100 graphs."""
        rng = np.random.default_rng(11)
        checked = 0
        seed = 0
        while checked < 100:
            n = int(rng.integers(4, 9))
            g = erdos_renyi_signed(n, float(rng.uniform(0.3, 0.9)), 0.0, seed=seed)
            seed += 1
            if not is_connected(g):
                continue
            b = cheeger_bounds(g)
            tol = 1e-9
            assert b.lower <= b.lambda2 + tol
            assert b.lambda2 <= b.upper + tol
            assert b.h <= b.refined_upper_on_h + tol
            assert b.holds
            checked += 1


class TestStructure:
    """Connected components and signed balance."""

    def test_components_labelled_by_first_appearance(self):
        """Verify labels start at 0 with vertex 0."""
        assert connected_components(block_diagonal([2, 3])) == [0, 0, 1, 1, 1]
        assert component_count(zero(3)) == 3

    def test_two_block_partition(self):
        """Verify the balanced two-block graph splits into its blocks."""
        part = balance_partition(two_block_signed(4, 4))
        assert part is not None
        assert part.side == (2, 2, 2, 2, 1, 1, 1, 1)
        assert part.n1 == [4, 5, 6, 7]

    def test_nonnegative_graph_is_balanced_on_one_side(self):
        """Verify an all-positive graph puts every vertex on side 2."""
        part = balance_partition(complete(5))
        assert part is not None and set(part.side) == {2}

    def test_negative_triangle_is_unbalanced(self):
        """Verify a triangle with one negative edge has no partition."""
        w = np.array([[0, 1, 1], [1, 0, -1], [1, -1, 0]], dtype=float)
        g = SignedGraph(weights=w)
        assert balance_partition(g) is None
        assert not is_balanced(g)
        assert not components_balanced(g)

    def test_partition_matches_edge_signs(self):
        """Verify positive edges stay inside camps and negative edges cross on random balanced graphs."""
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(3, 10))
            camp = rng.integers(1, 3, size=n)
            mask = np.triu(rng.random((n, n)) < 0.5, k=1)
            signs = np.where(camp[:, None] == camp[None, :], 1.0, -1.0)
            w = np.where(mask, signs, 0.0)
            g = SignedGraph(weights=w + w.T)
            part = balance_partition(g)
            assert part is not None
            side = np.asarray(part.side)
            for i, j, weight in g.edges():
                assert (side[i] == side[j]) == (weight > 0)

    def test_triangle_with_two_negative_edges(self):
        """Verify the (+, -, -) triangle on edges 01, 02, 12 keeps 0 and 1 together against 2."""
        w = np.array([[0, 1, -1], [1, 0, -1], [-1, -1, 0]], dtype=float)
        part = balance_partition(SignedGraph(weights=w))
        assert part is not None
        assert part.side == (2, 2, 1)
        assert part.n1 == [2]

    def test_all_negative_triangle_is_unbalanced(self):
        """Verify three mutually repelling vertices cannot be split into two camps."""
        w = -(np.ones((3, 3)) - np.eye(3))
        assert not is_balanced(SignedGraph(weights=w))

    def test_balance_agrees_with_exhaustive_labelling(self):
        """Verify BFS balance matches a search over all 2^n camp labellings on 500 graphs."""
        rng = np.random.default_rng(13)
        for seed in range(500):
            n = int(rng.integers(1, 7))
            p1 = float(rng.uniform(0.0, 0.6))
            g = erdos_renyi_signed(n, p1, float(rng.uniform(0.0, 1.0 - p1)), seed=seed)
            edges = g.edges()
            expected = any(
                all((labels[i] == labels[j]) == (weight > 0) for i, j, weight in edges)
                for labels in itertools.product((1, 2), repeat=n)
            )
            assert is_balanced(g) == expected
            assert (balance_partition(g) is not None) == expected

    def test_component_count_matches_labels(self):
        """Verify the spectral zero count and the label count agree on 200 nonnegative graphs."""
        rng = np.random.default_rng(17)
        for seed in range(200):
            n = int(rng.integers(1, 9))
            g = erdos_renyi_signed(n, float(rng.uniform(0.0, 0.5)), 0.0, seed=seed)
            labels = connected_components(g)
            assert component_count(g) == len(set(labels))
            assert spectrum(g).component_count == len(set(labels))


class TestBuildersAndIO:
    """Graph kinds and edge list files."""

    def test_from_kind_families(self):
        """Verify kind strings build the matching family."""
        assert from_kind("complete", 5).n == 5
        assert np.array_equal(from_kind("kNeighbor:1", 6).weights, cycle(6).weights)
        assert not from_kind("twoBlockSigned:3", 7).is_nonnegative
        assert component_count(from_kind("blockDiagonal:3,5", 8)) == 2

    def test_from_kind_bad_sizes(self):
        """Verify block sizes must add up to N."""
        with pytest.raises(GraphError):
            from_kind("blockDiagonal:3,4", 8)

    def test_unknown_kind(self):
        """Verify an unknown family is a ValueError from the parser."""
        with pytest.raises(ValueError):
            from_kind("star", 5)

    def test_edge_list_round_trip(self, tmp_path):
        """Verify saved weights load back exactly."""
        g = erdos_renyi_signed(6, 0.5, 0.3, seed=2)
        p = save_edge_list(g, tmp_path / "g.txt")
        loaded = load_edge_list(p, n=6)
        assert np.array_equal(loaded.weights, g.weights)

    def test_edge_list_symmetrizes_and_skips_comments(self, tmp_path):
        """Verify one-directional rows and comments are handled."""
        p = tmp_path / "edges.txt"
        p.write_text("# three vertices\n0 1 2.5\n1 2 -1\n")
        g = load_edge_list(p)
        assert g.n == 3
        assert g.weights[1, 0] == 2.5 and g.weights[2, 1] == -1.0

    def test_edge_list_rejects_self_loop(self, tmp_path):
        """Verify a row i i w is refused."""
        p = tmp_path / "loop.txt"
        p.write_text("0 0 1\n")
        with pytest.raises(GraphError):
            load_edge_list(p)

    def test_edge_list_rejects_out_of_range(self, tmp_path):
        """Verify indices beyond n are refused."""
        p = tmp_path / "far.txt"
        p.write_text("0 5 1\n")
        with pytest.raises(GraphError):
            load_edge_list(p, n=3)
