"""The graph carried by a net: vertices are net points, edges join points at
norm distance <= 3 * rho.

These graphs are the metric probes everything else consumes.  The audits
here re-check the construction from scratch: the edge rule as a
biconditional over all pairs, the hop-count path bound, the packing degree
bound 7^dim, and the distortion <= 3 of the identity embedding.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import InternalConsistencyError, ValidationError
from .graphs import (DistortionReport, FiniteMetric, Graph, audit, bfs_apsp,
                     from_edges, graph_from_json, graph_to_json, is_connected,
                     max_degree)
from .nets import Net, build_net, net_from_json, net_to_json
from .spaces import NormedSpace, norms

_REL_TOL = 1e-12


@dataclass(frozen=True)
class NetGraph:
    """Graph on a net with the 3*rho edge rule; coords payload = net points."""

    graph: Graph
    net: Net
    edge_threshold: float

    @property
    def space(self) -> NormedSpace:
        return self.net.space

    @property
    def points(self) -> np.ndarray:
        return self.net.points


def net_graph_from_net(net: Net) -> NetGraph:
    """Edges join net points at distance <= 3*rho (relative tolerance 1e-12).

    Disconnection would mean the covering certificate failed, which the
    construction rules out; it is raised as an internal error, not repaired.
    """
    thr = 3.0 * net.rho
    m = net.size
    edges = []
    for i in range(m - 1):
        d = norms(net.space, net.points[i + 1:] - net.points[i])
        for off in np.where(d <= thr * (1 + _REL_TOL))[0]:
            edges.append((i, i + 1 + int(off)))
    g = from_edges(m, edges, coords=net.points)
    if m > 1 and not is_connected(g):
        raise InternalConsistencyError(
            "net graph is disconnected: covering certificate violated")
    return NetGraph(graph=g, net=net, edge_threshold=thr)


def build_net_graph(space: NormedSpace, delta: float, r: float,
                    mesh_divisor: int = 4) -> NetGraph:
    return net_graph_from_net(build_net(space, delta, r, mesh_divisor))


def rescaled_unit(ng: NetGraph) -> tuple[NetGraph, float]:
    """Rescale coordinates by 1/rho: unit separation, unit covering,
    edge threshold 3.  Returns (netgraph, scale) with scale = 1/rho."""
    scale = 1.0 / ng.net.rho
    if abs(scale - 1.0) < _REL_TOL:
        return ng, 1.0
    net = Net(ng.net.space, ng.net.delta * scale, ng.net.r * scale,
              ng.net.points * scale, 1.0, origin_index=ng.net.origin_index)
    g = replace(ng.graph, coords=net.points, _csr=None)
    return NetGraph(graph=g, net=net, edge_threshold=3.0), scale


def verify_edge_rule(ng: NetGraph) -> bool:
    """Edge {i,j} present iff the pair is within the threshold (all pairs)."""
    thr = ng.edge_threshold * (1 + _REL_TOL)
    adj = [set(a) for a in ng.graph.adj]
    for i in range(ng.net.size - 1):
        d = norms(ng.space, ng.points[i + 1:] - ng.points[i])
        for off, dist in enumerate(d):
            j = i + 1 + off
            if (dist <= thr) != (j in adj[i]):
                return False
    return True


@dataclass(frozen=True)
class PathBoundReport:
    ok: bool
    pairs_checked: int
    max_forward_ratio: float
    violation: Optional[dict] = None


def verify_path_bound(ng: NetGraph) -> PathBoundReport:
    """Hop-count bounds for every vertex pair.

    Within the threshold the pair must be a single edge; beyond it the hop
    count must not exceed floor(||u - v|| / rho).  Also tracks the largest
    forward ratio ||u - v|| / d_G, which the edge rule caps at 3*rho.
    """
    hops = bfs_apsp(ng.graph)
    rho = ng.net.rho
    thr = ng.edge_threshold * (1 + _REL_TOL)
    worst = None
    max_fwd = 0.0
    pairs = 0
    for i in range(ng.net.size - 1):
        d = norms(ng.space, ng.points[i + 1:] - ng.points[i])
        h = hops[i, i + 1:].astype(np.float64)
        pairs += d.size
        max_fwd = max(max_fwd, float(np.max(d / h)))
        near = d <= thr
        bad_near = near & (h != 1)
        bound = np.floor(d / rho * (1 + _REL_TOL))
        bad_far = (~near) & (h > bound)
        bad = np.where(bad_near | bad_far)[0]
        if bad.size and worst is None:
            off = int(bad[0])
            worst = {"u": i, "v": i + 1 + off, "norm_distance": float(d[off]),
                     "hops": int(h[off]),
                     "bound": 1 if near[off] else int(bound[off])}
    return PathBoundReport(ok=worst is None, pairs_checked=pairs,
                           max_forward_ratio=max_fwd, violation=worst)


def degree_bound(ng: NetGraph) -> int:
    """Packing bound on the maximum degree: 7^dim."""
    return 7 ** ng.space.dim


def audit_identity_embedding(ng: NetGraph, enforce: bool = True) -> DistortionReport:
    """Distortion of the identity map (V, d_G) -> (V, ||.||); must be <= 3."""
    if ng.net.size < 2:
        raise ValidationError("audit needs at least two vertices")
    report = audit(FiniteMetric.from_graph(ng.graph),
                   FiniteMetric.from_points(ng.space, ng.points),
                   np.arange(ng.net.size))
    if enforce and report.distortion > 3.0 * (1 + 1e-9):
        raise InternalConsistencyError(
            f"identity embedding distortion {report.distortion} exceeds 3")
    return report


def net_graph_to_json(ng: NetGraph) -> dict:
    obj = graph_to_json(ng.graph)
    obj["edge_threshold"] = ng.edge_threshold
    obj["net"] = net_to_json(ng.net)
    return obj


def net_graph_from_json(obj: dict) -> NetGraph:
    try:
        net = net_from_json(obj["net"])
        thr = float(obj["edge_threshold"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed net-graph JSON: {exc}") from exc
    g = graph_from_json(obj)
    if g.n != net.size:
        raise ValidationError("net-graph JSON: vertex count does not match net size")
    return NetGraph(graph=replace(g, coords=net.points), net=net, edge_threshold=thr)
