"""Nets in normed balls and the graphs they carry.

Builds separated covering point sets in balls of several finite-dimensional
normed spaces, puts the threshold graph on top, and audits the two claims
that make these graphs useful metric probes: the identity embedding has
distortion at most 3, and the maximum degree stays under 7^dim.
"""

import numpy as np

from netembed import (audit_identity_embedding, build_net_graph, degree_bound,
                      lp_space, max_degree, verify_net, verify_path_bound)

INF = float("inf")

print("=" * 72)
print("Ball net graphs: distortion <= 3, degree <= 7^dim")
print("=" * 72)

for label, space in [("l1^2", lp_space(1, 2)), ("l2^2", lp_space(2, 2)),
                     ("linf^2", lp_space(INF, 2)), ("l2^3", lp_space(2, 3))]:
    for r in (2.0, 3.0):
        ng = build_net_graph(space, delta=1.0, r=r)
        rep = audit_identity_embedding(ng)
        pb = verify_path_bound(ng)
        print(f"\n{label}, ball radius {r}:")
        print(f"  net: {ng.net.size} points, covering radius rho = {ng.net.rho:.4f}")
        print(f"  graph: {ng.graph.edge_count} edges at threshold 3*rho = "
              f"{ng.edge_threshold:.4f}")
        print(f"  identity embedding: lip = {rep.lip_forward:.4f}, "
              f"inverse lip = {rep.lip_inverse:.4f}, "
              f"distortion = {rep.distortion:.6f}  (<= 3)")
        print(f"  hop-count path bound holds: {pb.ok}; "
              f"max degree {max_degree(ng.graph)} <= {degree_bound(ng)}")

print("\n" + "=" * 72)
print("Covering audit by random probes")
print("=" * 72)
ng = build_net_graph(lp_space(2, 2), 1.0, 3.0)
audit = verify_net(ng.net, probe_count=20_000, rng=np.random.default_rng(0))
print(f"min separation {audit.min_separation:.4f} >= rho = {ng.net.rho:.4f}; "
      f"max probe gap {audit.max_probe_gap:.4f} <= rho")

print("\nThe family delta = 1/n, r = n scales without losing the bound:")
for n in (2, 3):
    ng = build_net_graph(lp_space(2, 2), 1.0 / n, float(n))
    rep = audit_identity_embedding(ng)
    print(f"  n = {n}: {ng.net.size} points, distortion {rep.distortion:.6f}")
