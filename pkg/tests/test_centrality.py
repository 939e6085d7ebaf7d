import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlcent.admissibility import mu
from mlcent.centrality import (
    Baseline,
    Measure,
    degree_centrality,
    eigenvector_centrality,
    kendall_tau,
    ml_communicability,
    ml_subgraph_centrality,
    ml_total_communicability,
    sweep_grid,
    write_mu_csv,
    write_sweep_csv,
)
from mlcent.errors import (
    AdmissibilityWarning,
    DisconnectedGraphWarning,
    MLDomainError,
)
from mlcent.graphio import Graph, parse_edge_list
from mlcent.mlkernel import MLParams

from oracles import kendall_tau_brute
from synthetic import distinct_degree_graph, er_graph, planted_clique

K3 = parse_edge_list("0 1\n1 2\n0 2\n")
P3 = parse_edge_list("0 1\n1 2\n")
EMPTY2 = Graph(n=2, edges=())


class TestDegree:
    def test_triangle(self):
        assert degree_centrality(K3).scores.tolist() == [2.0, 2.0, 2.0]

    def test_path(self):
        assert degree_centrality(P3).scores.tolist() == [1.0, 2.0, 1.0]

    def test_empty(self):
        assert degree_centrality(EMPTY2).scores.tolist() == [0.0, 0.0]


class TestEigenvector:
    def test_triangle(self):
        s = eigenvector_centrality(K3).scores
        assert np.allclose(s, 1.0 / math.sqrt(3.0), atol=1e-9)

    def test_path(self):
        s = eigenvector_centrality(P3).scores
        assert np.allclose(s, [0.5, math.sqrt(2) / 2.0, 0.5], atol=1e-9)

    def test_star_ratio(self):
        star = parse_edge_list("0 1\n0 2\n0 3\n")
        s = eigenvector_centrality(star).scores
        assert s[0] / s[1] == pytest.approx(math.sqrt(3.0), rel=1e-8)

    def test_disconnected_warns_and_zeroes(self):
        g = Graph(n=5, edges=((0, 1), (1, 2), (3, 4)))
        with pytest.warns(DisconnectedGraphWarning):
            s = eigenvector_centrality(g).scores
        assert s[3] == s[4] == 0.0
        assert np.linalg.norm(s) == pytest.approx(1.0)

    def test_requires_an_edge(self):
        with pytest.raises(MLDomainError):
            eigenvector_centrality(EMPTY2)


class TestMLSubgraph:
    def test_empty_graph_all_ones(self):
        for alpha in (0.3, 0.7, 1.0):
            s = ml_subgraph_centrality(EMPTY2, MLParams(alpha, gamma=0.5)).scores
            assert np.allclose(s, 1.0)

    def test_triangle_exponential(self):
        s = ml_subgraph_centrality(K3, MLParams(1.0)).scores
        assert np.allclose(s, (math.e**2 + 2.0 / math.e) / 3.0, rtol=1e-12)

    def test_path_resolvent(self):
        s = ml_subgraph_centrality(P3, MLParams(0.0, gamma=0.5)).scores
        assert np.allclose(s, [1.5, 2.0, 1.5], atol=1e-13)

    def test_scores_at_least_one(self):
        g = er_graph(30, 0.15, seed=4)
        rho = max(abs(np.linalg.eigvalsh(g.dense())).max(), 1e-9)
        for alpha in (0.3, 0.6, 1.0):
            gam = 0.9 * mu(alpha, rho).mu
            s = ml_subgraph_centrality(g, MLParams(alpha, gamma=gam)).scores
            assert (s >= 1.0 - 1e-12).all()

    def test_overflow_becomes_nan(self):
        g = er_graph(30, 0.3, seed=1)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AdmissibilityWarning)
            s = ml_subgraph_centrality(g, MLParams(0.1, gamma=2.0)).scores
        assert np.isnan(s).all()

    def test_inadmissible_gamma_warns(self):
        with pytest.warns(AdmissibilityWarning):
            ml_subgraph_centrality(K3, MLParams(0.5, gamma=1.0))


class TestMLTotalCommunicability:
    def test_empty_graph(self):
        s = ml_total_communicability(EMPTY2, MLParams(0.5, gamma=0.5)).scores
        assert np.allclose(s, 1.0)

    def test_triangle_perron(self):
        s = ml_total_communicability(K3, MLParams(1.0)).scores
        assert np.allclose(s, math.e**2, rtol=1e-10)

    def test_small_gamma_ranks_by_degree(self):
        g = distinct_degree_graph()
        deg = degree_centrality(g).scores
        for alpha in (0.1, 0.4, 0.7, 1.0):
            gam = 1e-6 * mu(alpha, 5.0).mu
            t = ml_total_communicability(g, MLParams(alpha, gamma=gam)).scores
            order = np.argsort(-t)
            assert int(order[0]) == int(np.argmax(deg))
            # degree sequence is non-increasing along the score ranking
            assert (np.diff(deg[order]) <= 1e-12).all()

    def test_subgraph_below_total(self):
        g = er_graph(25, 0.2, seed=9)
        rho = abs(np.linalg.eigvalsh(g.dense())).max()
        p = MLParams(0.6, gamma=0.9 * mu(0.6, rho).mu)
        s = ml_subgraph_centrality(g, p).scores
        t = ml_total_communicability(g, p).scores
        assert (s <= t + 1e-9 * t).all()


class TestMLCommunicability:
    def test_empty_pair_is_zero(self):
        assert ml_communicability(EMPTY2, MLParams(0.5, gamma=0.5), 0, 1) == 0.0

    def test_single_edge_sinh(self):
        g = parse_edge_list("0 1\n")
        got = ml_communicability(g, MLParams(1.0), 0, 1)
        assert got == pytest.approx(math.sinh(1.0), rel=1e-12)

    def test_triangle_resolvent(self):
        got = ml_communicability(K3, MLParams(0.0, gamma=0.4), 0, 1)
        want = np.linalg.inv(np.eye(3) - 0.4 * K3.dense())[0, 1]
        assert got == pytest.approx(want, rel=1e-12)

    def test_same_node_rejected(self):
        with pytest.raises(MLDomainError):
            ml_communicability(K3, MLParams(0.5, gamma=0.5), 1, 1)


class TestKendallTau:
    def test_identical(self):
        assert kendall_tau([1, 2, 3], [1, 2, 3]) == 1.0

    def test_reversed(self):
        assert kendall_tau([1, 2, 3], [3, 2, 1]) == -1.0

    def test_tie_correction(self):
        assert kendall_tau([1, 1, 2], [1, 2, 3]) == pytest.approx(
            2.0 / math.sqrt(6.0), rel=1e-14
        )

    def test_constant_rejected(self):
        with pytest.raises(MLDomainError):
            kendall_tau([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_length_mismatch(self):
        with pytest.raises(MLDomainError):
            kendall_tau([1.0, 2.0], [1.0, 2.0, 3.0])

    @given(
        st.lists(st.integers(0, 8), min_size=2, max_size=60),
        st.integers(0, 2**31),
    )
    @settings(max_examples=120, deadline=None)
    def test_matches_pair_enumeration(self, xs, seed):
        rng = np.random.default_rng(seed)
        x = np.array(xs, dtype=float)
        y = rng.integers(0, 8, size=len(x)).astype(float)
        if len(set(xs)) < 2 or len(set(y.tolist())) < 2:
            return
        assert kendall_tau(x, y) == pytest.approx(
            kendall_tau_brute(x.tolist(), y.tolist()), abs=1e-13
        )


class TestLimits:
    def test_alpha_to_zero_scores(self):
        g = er_graph(25, 0.2, seed=5)
        rho = abs(np.linalg.eigvalsh(g.dense())).max()
        gam = 0.5 * min(1.0, 1.0 / rho)
        s_small = ml_subgraph_centrality(g, MLParams(1e-3, gamma=gam)).scores
        s_res = ml_subgraph_centrality(g, MLParams(0.0, gamma=gam)).scores
        assert np.abs(s_small - s_res).max() / np.abs(s_res).max() <= 1e-2

    def test_alpha_to_one_scores(self):
        g = er_graph(25, 0.2, seed=5)
        rho = abs(np.linalg.eigvalsh(g.dense())).max()
        gam = 0.5 * min(1.0, 1.0 / rho)
        s_near = ml_subgraph_centrality(g, MLParams(1.0 - 1e-3, gamma=gam)).scores
        s_exp = ml_subgraph_centrality(g, MLParams(1.0, gamma=gam)).scores
        assert np.abs(s_near - s_exp).max() / np.abs(s_exp).max() <= 1e-2

    def test_gapped_graph_tracks_eigenvector(self):
        g = planted_clique(100, 0.05, 14, seed=2)
        ev = eigenvector_centrality(g).scores
        rho = abs(np.linalg.eigvalsh(g.dense())).max()
        for alpha in (0.5, 1.0):
            t = ml_total_communicability(g, MLParams(alpha, gamma=mu(alpha, rho).mu)).scores
            assert kendall_tau(t, ev) >= 0.95

    def test_permutation_equivariance(self):
        g = er_graph(20, 0.25, seed=8)
        rng = np.random.default_rng(0)
        perm = rng.permutation(20)
        remapped = {int(old): int(new) for new, old in enumerate(perm)}
        edges = tuple(sorted(tuple(sorted((remapped[i], remapped[j]))) for i, j in g.edges))
        gp = Graph(n=20, edges=edges)
        p = MLParams(0.5, gamma=0.4)
        for fn in (degree_centrality,
                   lambda h: ml_subgraph_centrality(h, p),
                   lambda h: ml_total_communicability(h, p)):
            s = fn(g).scores
            sp = fn(gp).scores
            for old in range(20):
                assert sp[remapped[old]] == pytest.approx(s[old], rel=1e-9, abs=1e-12)


class TestSweepGrid:
    def test_diagnostic_self_correlation(self):
        g = er_graph(25, 0.2, seed=5)
        grid = sweep_grid(g, [0.4, 0.8], [0.05, 0.3], Baseline.DEGREE,
                          Measure.ML_SUBGRAPH)
        assert grid.tau.shape == (2, 2)
        assert np.isfinite(grid.tau).all()
        assert (np.abs(grid.tau[np.isfinite(grid.tau)]) <= 1.0).all()

    def test_tiny_gamma_tracks_degree(self):
        # at gamma -> 0 every non-degree-tied pair must be concordant, so
        # tau equals the tie ceiling sqrt(1 - n1/n0) exactly
        g = er_graph(40, 0.15, seed=2)
        grid = sweep_grid(g, [0.5], [1e-5], Baseline.DEGREE, Measure.ML_TOTAL_COMM)
        deg = degree_centrality(g).scores
        n0 = g.n * (g.n - 1) // 2
        _, counts = np.unique(deg, return_counts=True)
        n1 = int((counts * (counts - 1) // 2).sum())
        assert grid.tau[0, 0] == pytest.approx(math.sqrt(1.0 - n1 / n0), abs=1e-12)

    def test_nan_region_structure(self):
        g = er_graph(30, 0.2, seed=3)
        alphas = np.linspace(0.05, 1.0, 6)
        gammas = np.linspace(0.05, 2.0, 8)
        grid = sweep_grid(g, alphas, gammas, Baseline.DEGREE, Measure.ML_SUBGRAPH)
        for ia in range(len(alphas)):
            for ig, gam in enumerate(gammas):
                if gam <= grid.mu_curve[ia]:
                    assert np.isfinite(grid.tau[ia, ig])

    def test_csv_emission(self, tmp_path):
        g = er_graph(20, 0.2, seed=6)
        grid = sweep_grid(g, [0.1, 0.9], [0.05, 1.9], Baseline.DEGREE,
                          Measure.ML_SUBGRAPH)
        grid_path = tmp_path / "grid.csv"
        mu_path = tmp_path / "mu.csv"
        write_sweep_csv(grid, grid_path, "test")
        write_mu_csv(grid, mu_path)
        lines = grid_path.read_text().splitlines()
        assert lines[0].startswith("#")
        assert lines[1] == "alpha,gamma,tau,finite"
        assert len(lines) == 2 + 4
        for ln in lines[2:]:
            cells = ln.split(",")
            assert len(cells) == 4
            if cells[2] == "nan":
                assert cells[3] == "0"
        mu_lines = mu_path.read_text().splitlines()
        assert mu_lines[1] == "alpha,mu"
        assert len(mu_lines) == 4

    def test_empty_grid_rejected(self):
        with pytest.raises(MLDomainError):
            sweep_grid(K3, [], [0.5])
