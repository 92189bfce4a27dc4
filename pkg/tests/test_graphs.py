import numpy as np
import pytest

from netembed import (FiniteMetric, ValidationError, audit, audit_pair_rows,
                      bfs_apsp, from_edges, graph_from_json, graph_to_dot,
                      graph_to_json, is_connected, lp_space, max_degree,
                      write_audit_csv)


def path_graph(n):
    return from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n):
    return from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


class TestConstruction:
    def test_rejects_loops(self):
        with pytest.raises(ValidationError):
            from_edges(3, [(0, 0)])

    def test_rejects_duplicates(self):
        with pytest.raises(ValidationError):
            from_edges(3, [(0, 1), (1, 0)])

    def test_adjacency_sorted_symmetric(self):
        g = from_edges(4, [(2, 0), (3, 1), (0, 1)])
        for u in range(4):
            assert list(g.adj[u]) == sorted(g.adj[u])
            for v in g.adj[u]:
                assert u in g.adj[v]


class TestBfs:
    def test_path_end_to_end(self):
        assert bfs_apsp(path_graph(4))[0, 3] == 3

    def test_complete_all_ones(self):
        d = bfs_apsp(complete_graph(5))
        off = ~np.eye(5, dtype=bool)
        assert np.all(d[off] == 1)

    def test_c6_against_walk_enumeration(self):
        # oracle: adjacency-matrix powers give the least k with (A^k)[i,j] > 0
        g = cycle_graph(6)
        a = np.zeros((6, 6), dtype=np.int64)
        for u, v in g.edges:
            a[u, v] = a[v, u] = 1
        want = np.full((6, 6), -1)
        np.fill_diagonal(want, 0)
        power = np.eye(6, dtype=np.int64)
        for k in range(1, 7):
            power = power @ a
            newly = (power > 0) & (want < 0)
            want[newly] = k
        assert np.array_equal(bfs_apsp(g), want)
        assert want[0, 3] == 3

    def test_disconnected_raises(self):
        g = from_edges(4, [(0, 1), (2, 3)])
        assert not is_connected(g)
        with pytest.raises(ValidationError):
            bfs_apsp(g)

    def test_against_networkx(self):
        nx = pytest.importorskip("networkx")
        rng = np.random.default_rng(17)
        for trial in range(10):
            n = int(rng.integers(5, 40))
            gx = nx.gnp_random_graph(n, 0.3, seed=int(rng.integers(1 << 30)))
            if not nx.is_connected(gx):
                gx = nx.compose(gx, nx.path_graph(n))
            g = from_edges(n, list(gx.edges()))
            ours = bfs_apsp(g)
            theirs = dict(nx.all_pairs_shortest_path_length(gx))
            for i in range(n):
                for j in range(n):
                    assert ours[i, j] == theirs[i][j]

    def test_triangle_inequality_integer(self):
        d = bfs_apsp(cycle_graph(9))
        n = 9
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    assert d[i, j] <= d[i, k] + d[k, j]


class TestStructure:
    def test_max_degrees(self):
        assert max_degree(complete_graph(4)) == 3
        assert max_degree(from_edges(6, [(0, i) for i in range(1, 6)])) == 5


class TestAudit:
    def test_identity_isometry(self):
        m = FiniteMetric.from_graph(cycle_graph(6))
        rep = audit(m, m, np.arange(6))
        assert rep.distortion == 1.0
        assert rep.exhaustive

    def test_scaling_is_distortion_free(self):
        g = path_graph(5)
        m = FiniteMetric.from_graph(g)
        scaled = FiniteMetric(5, lambda i: m.row(i) * 7.0)
        rep = audit(m, scaled, np.arange(5))
        assert rep.lip_forward == pytest.approx(7.0)
        assert rep.lip_inverse == pytest.approx(1 / 7.0)
        assert rep.distortion == pytest.approx(1.0, abs=1e-12)

    def test_p3_onto_line_explicit_pairs(self):
        # three pairs by hand: (0,1) -> 1/1, (1,2) -> 0.5/1, (0,2) -> 1.5/2
        source = FiniteMetric.from_graph(path_graph(3))
        target = FiniteMetric.from_points(lp_space(2, 1),
                                          np.array([[0.0], [1.0], [1.5]]))
        rep = audit(source, target, np.arange(3))
        assert rep.lip_forward == pytest.approx(1.0)
        assert rep.lip_inverse == pytest.approx(2.0)  # pair (1,2)
        assert rep.distortion == pytest.approx(2.0)
        assert rep.witness_inverse == (1, 2)

    def test_rescaling_target_invariance(self):
        rng = np.random.default_rng(31)
        pts = rng.normal(size=(12, 3))
        source = FiniteMetric.from_graph(complete_graph(12))
        t1 = FiniteMetric.from_points(lp_space(2, 3), pts)
        t2 = FiniteMetric.from_points(lp_space(2, 3), pts * 137.0)
        r1 = audit(source, t1, np.arange(12))
        r2 = audit(source, t2, np.arange(12))
        assert r1.distortion == pytest.approx(r2.distortion, rel=1e-12)

    def test_non_injective_rejected(self):
        m = FiniteMetric.from_graph(path_graph(3))
        with pytest.raises(ValidationError):
            audit(m, m, [0, 1, 1])

    def test_zero_source_distance_rejected(self):
        bad = FiniteMetric(3, lambda i: np.zeros(3))
        good = FiniteMetric.from_graph(path_graph(3))
        with pytest.raises(ValidationError):
            audit(bad, good, np.arange(3))

    def test_sampled_mode_reports(self):
        g = path_graph(150)
        m = FiniteMetric.from_graph(g)
        rep = audit(m, m, np.arange(150), pair_cap=50,
                    rng=np.random.default_rng(0))
        assert not rep.exhaustive
        assert rep.pairs_checked > 0
        assert rep.distortion == pytest.approx(1.0)


class TestSerialization:
    def test_json_roundtrip(self):
        g = from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)],
                       coords=np.eye(4, 2) * 2)
        again = graph_from_json(graph_to_json(g))
        assert again.n == g.n and again.edges == g.edges
        assert np.allclose(again.coords, g.coords)

    def test_dot_contains_edges(self):
        text = graph_to_dot(path_graph(3))
        assert "0 -- 1;" in text and "1 -- 2;" in text

    def test_csv_rows(self, tmp_path):
        g = path_graph(3)
        m = FiniteMetric.from_graph(g)
        rows = list(audit_pair_rows(m, m, np.arange(3)))
        assert (0, 2, 2.0, 2.0, 1.0) in rows
        out = tmp_path / "rep.csv"
        write_audit_csv(out, m, m, np.arange(3))
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "pair_u,pair_v,d_source,d_target,ratio"
        assert len(lines) == 4
