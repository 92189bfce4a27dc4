import math

import numpy as np
import pytest

from netembed import (ValidationError, build_net, lp_space, nearest_net_point,
                      net_from_json, net_to_json, norm, norms,
                      verify_maximality, verify_net)


def greedy_oracle(space, delta, r, k):
    """Independent pure-python reimplementation of the construction rule:
    lexicographic scan of the lattice (delta/k)Z^n in r*B, forced origin,
    keep at pairwise distance >= rho = delta + (delta/k)*linf_factor."""
    h = delta / k
    rho = delta + h * space.linf_factor
    half = int(math.floor(r * space.box_factor / h + 1e-12))
    axis = [h * i for i in range(-half, half + 1)]
    cands = [(0.0,) * space.dim]
    stack = [()]
    for _ in range(space.dim):
        stack = [t + (x,) for t in stack for x in axis]
    cands += [c for c in sorted(stack)
              if norm(space, list(c)) <= r * (1 + 1e-12) and any(c)]
    kept = []
    for c in cands:
        if all(norm(space, np.array(c) - np.array(p)) >= rho * (1 - 1e-12)
               for p in kept):
            kept.append(c)
    return kept, rho


class TestBuildNet:
    def test_matches_independent_oracle(self):
        for space, delta, r, k in [
            (lp_space(math.inf, 2), 1.0, 2.0, 2),
            (lp_space(2, 2), 1.0, 2.0, 4),
            (lp_space(1, 2), 1.0, 2.5, 4),
            (lp_space(2, 1), 1.0, 2.0, 4),
        ]:
            net = build_net(space, delta, r, k)
            oracle, rho = greedy_oracle(space, delta, r, k)
            assert net.rho == pytest.approx(rho, rel=1e-12)
            got = sorted(map(tuple, np.round(net.points, 9)))
            want = sorted(tuple(round(x, 9) for x in c) for c in oracle)
            assert got == want

    def test_origin_always_first(self):
        net = build_net(lp_space(2, 2), 1.0, 2.0)
        assert np.all(net.points[0] == 0.0)
        assert net.origin_index == 0

    def test_tiny_ball_keeps_origin_only_region(self):
        net = build_net(lp_space(2, 2), 1.0, 1.01)
        assert net.size >= 1
        assert np.all(net.points[0] == 0.0)

    def test_separation_at_least_rho(self):
        for space in (lp_space(2, 2), lp_space(1, 2), lp_space(math.inf, 3)):
            net = build_net(space, 1.0, 2.0)
            for i in range(net.size - 1):
                d = norms(space, net.points[i + 1:] - net.points[i])
                assert np.all(d >= net.rho * (1 - 1e-12))
                assert np.all(d >= net.delta)  # a fortiori

    def test_points_inside_ball(self):
        net = build_net(lp_space(2, 3), 1.0, 2.0)
        assert np.all(norms(net.space, net.points) <= net.r * (1 + 1e-12))

    def test_determinism(self):
        a = build_net(lp_space(2, 2), 1.0, 3.0)
        b = build_net(lp_space(2, 2), 1.0, 3.0)
        assert np.array_equal(a.points, b.points)

    def test_greedy_maximality(self):
        for space in (lp_space(2, 2), lp_space(math.inf, 2)):
            net = build_net(space, 1.0, 2.0)
            assert verify_maximality(net)

    def test_candidate_cap_guard(self):
        with pytest.raises(ValidationError):
            build_net(lp_space(2, 4), 0.01, 3.0)

    def test_parameter_validation(self):
        with pytest.raises(ValidationError):
            build_net(lp_space(2, 2), 2.0, 1.0)
        with pytest.raises(ValidationError):
            build_net(lp_space(2, 2), 1.0, 2.0, mesh_divisor=1)


class TestNearestNetPoint:
    def test_outside_ball_maps_to_origin(self):
        net = build_net(lp_space(2, 2), 1.0, 2.0)
        y = np.array([5.0, 5.0])
        assert np.all(nearest_net_point(net, y) == 0.0)

    def test_net_point_maps_to_itself(self):
        net = build_net(lp_space(2, 2), 1.0, 2.0)
        p = net.points[-1]
        assert np.allclose(nearest_net_point(net, p), p)

    def test_exhaustive_scan_oracle(self):
        net = build_net(lp_space(math.inf, 2), 1.0, 2.0, 2)
        rng = np.random.default_rng(9)
        for _ in range(300):
            y = rng.uniform(-2, 2, size=2)
            got = nearest_net_point(net, y)
            dists = [norm(net.space, y - p) for p in net.points]
            best = min(dists)
            # ties break to the lowest index
            idx = dists.index(best)
            assert np.allclose(got, net.points[idx])

    def test_tie_breaks_to_lowest_index(self):
        net = build_net(lp_space(math.inf, 1), 1.0, 2.0, 4)
        # midpoint between two net points: equidistant, pick the earlier row
        pts = sorted(float(p[0]) for p in net.points)
        mid = 0.5 * (pts[0] + pts[1])
        got = float(nearest_net_point(net, [mid])[0])
        d0 = abs(mid - pts[0])
        candidates = [float(p[0]) for p in net.points
                      if abs(abs(mid - float(p[0])) - d0) < 1e-12]
        first = min(range(net.size),
                    key=lambda i: math.inf if float(net.points[i][0]) not in candidates
                    else i)
        assert got == float(net.points[first][0])


class TestVerifyNet:
    def test_min_separation_exact(self):
        net = build_net(lp_space(math.inf, 2), 1.0, 2.0)
        audit = verify_net(net, 100, np.random.default_rng(0))
        d_all = []
        for i in range(net.size - 1):
            d_all.extend(norms(net.space, net.points[i + 1:] - net.points[i]))
        assert audit.min_separation == pytest.approx(min(d_all), rel=1e-12)

    def test_probe_gap_within_rho(self):
        rng = np.random.default_rng(1)
        for space in (lp_space(2, 2), lp_space(1, 2), lp_space(math.inf, 2),
                      lp_space(2, 3)):
            net = build_net(space, 1.0, 2.0)
            audit = verify_net(net, 10_000, rng)
            assert audit.max_probe_gap <= net.rho

    def test_single_point_net_gap(self):
        from netembed import Net
        space = lp_space(2, 2)
        net = Net(space, 1.0, 0.5, np.zeros((1, 2)), 0.5)
        audit = verify_net(net, 500, np.random.default_rng(2))
        assert audit.max_probe_gap <= 0.5


class TestNetSerialization:
    def test_roundtrip(self):
        net = build_net(lp_space(2, 2), 1.0, 2.0)
        again = net_from_json(net_to_json(net))
        assert np.array_equal(again.points, net.points)
        assert again.rho == net.rho
        assert again.origin_index == net.origin_index

    def test_malformed(self):
        with pytest.raises(ValidationError):
            net_from_json({"space": {"kind": "lp", "p": 2, "dim": 2}})
