"""Edge subdivision and the bounded-degree gadget.

Given a connected base graph G with e edges, the gadget H replaces every
vertex u by a "short path" of e vertices (one per base edge, in a fixed
lexicographic edge order) and every base edge j by a "long path" of M unit
edges joining the label-j vertices of its endpoints' short paths.  Short
paths meet long paths only at matching labels, so the maximum degree is 3.

Two maps are audited:

  anchor map    base vertex u -> the anchor-label vertex of u's short path;
                hop distances satisfy M*d_G <= d_H <= (2e + M)*d_G.
  product map   gadget vertex -> (positions on the subdivided graph) + label
                in the l1 sum  X + R; 1-Lipschitz after normalization, with
                inverse Lipschitz constant at most twice that of the
                subdivided-graph positions.

Short paths carry exactly e vertices (length e-1): a trailing unlabeled
vertex would change no distance bound and is dropped; see the metadata flag
on the JSON output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalConsistencyError, ValidationError
from .graphs import (DistortionReport, FiniteMetric, Graph, audit, bfs_apsp,
                     bfs_from, from_edges, is_connected, max_degree)
from .spaces import NormedSpace, direct_sum_l1, lp_space, norms


def _sorted_edges(g: Graph) -> tuple:
    return tuple(g.edges)  # already (u, v) with u < v, lexicographic


@dataclass(frozen=True)
class SubdividedGraph:
    """Each base edge replaced by a path of M unit edges.

    Vertex ids: 0..n-1 are the base vertices; the k-th interior vertex of
    edge j (k = 0..M-2, walking from the smaller endpoint) is
    n + j*(M-1) + k.
    """

    graph: Graph
    base: Graph
    M: int
    edge_list: tuple

    def interior_id(self, j: int, k: int) -> int:
        return self.base.n + j * (self.M - 1) + k

    def vertex_kind(self, vid: int):
        """("orig", u) or ("edge", j, step) with step in 1..M-1 from the
        smaller endpoint."""
        if vid < self.base.n:
            return ("orig", vid)
        off = vid - self.base.n
        return ("edge", off // (self.M - 1), off % (self.M - 1) + 1)


def subdivide(g: Graph, M: int) -> SubdividedGraph:
    """Replace each edge by a path of length M; M = 1 leaves g unchanged."""
    if M < 1:
        raise ValidationError("M must be >= 1")
    edge_list = _sorted_edges(g)
    edges = []
    nxt = g.n
    for (u, v) in edge_list:
        if M == 1:
            edges.append((u, v))
            continue
        chain = [u] + list(range(nxt, nxt + M - 1)) + [v]
        nxt += M - 1
        edges.extend(zip(chain, chain[1:]))
    return SubdividedGraph(graph=from_edges(nxt, edges), base=g, M=M,
                           edge_list=edge_list)


@dataclass(frozen=True)
class GadgetGraph:
    """Maximum-degree-3 expansion of a base graph.

    short_ids[u, i] is the short-path vertex of base vertex u carrying label
    i+1; long_interior[j] lists the interior vertices of long path j walking
    from the smaller endpoint.  psi_anchor is the label whose short-path
    vertices serve as images of the base vertices (default 1).
    """

    graph: Graph
    base: Graph
    M: int
    edge_list: tuple
    short_ids: np.ndarray
    long_interior: np.ndarray
    psi_anchor: int = 1

    @property
    def edge_labels(self) -> dict:
        return {e: i + 1 for i, e in enumerate(self.edge_list)}


def build_gadget(g: Graph, M: int, psi_anchor: int = 1) -> GadgetGraph:
    """Construct the gadget; asserts max degree <= 3 and connectivity."""
    if M < 1:
        raise ValidationError("M must be >= 1")
    if not is_connected(g):
        raise ValidationError("base graph must be connected")
    edge_list = _sorted_edges(g)
    e = len(edge_list)
    if e < 1:
        raise ValidationError("base graph needs at least one edge")
    if not (1 <= psi_anchor <= e):
        raise ValidationError(f"psi_anchor must be a label in 1..{e}")

    short_ids = np.arange(g.n * e, dtype=np.int64).reshape(g.n, e)
    long_interior = np.arange(g.n * e, g.n * e + e * (M - 1),
                              dtype=np.int64).reshape(e, max(M - 1, 0)) \
        if M > 1 else np.empty((e, 0), dtype=np.int64)
    n_h = g.n * e + e * (M - 1)

    edges = []
    for u in range(g.n):
        row = short_ids[u]
        edges.extend(zip(row[:-1], row[1:]))
    for j, (a, b) in enumerate(edge_list):
        chain = [int(short_ids[a, j])] + [int(x) for x in long_interior[j]] \
            + [int(short_ids[b, j])]
        edges.extend(zip(chain, chain[1:]))
    h = from_edges(n_h, edges)
    if max_degree(h) > 3:
        raise InternalConsistencyError("gadget degree exceeded 3")
    if not is_connected(h):
        raise InternalConsistencyError("gadget is disconnected for a connected base")
    return GadgetGraph(graph=h, base=g, M=M, edge_list=edge_list,
                       short_ids=short_ids, long_interior=long_interior,
                       psi_anchor=psi_anchor)


def anchor_map(h: GadgetGraph) -> np.ndarray:
    """Base vertex u -> the anchor-label vertex of u's short path."""
    return h.short_ids[:, h.psi_anchor - 1].copy()


def audit_anchor_map(h: GadgetGraph, enforce: bool = True) -> DistortionReport:
    """Exhaustive audit of the anchor map G -> H.

    Per pair: M*d_G <= d_H <= (2e + M)*d_G, hence lip <= 2e+M and inverse
    lip <= 1/M.
    """
    g = h.base
    e = len(h.edge_list)
    amap = anchor_map(h)
    d_g = bfs_apsp(g)
    rows = {int(amap[u]): bfs_from(h.graph, int(amap[u])) for u in range(g.n)}
    lip_f = lip_i = 0.0
    wit_f = wit_i = (0, 1)
    pairs = 0
    for u in range(g.n):
        for v in range(u + 1, g.n):
            dh = int(rows[int(amap[u])][int(amap[v])])
            dg = int(d_g[u, v])
            pairs += 1
            if enforce and not (h.M * dg <= dh <= (2 * e + h.M) * dg):
                raise InternalConsistencyError(
                    f"anchor-map bound failed on pair ({u},{v}): "
                    f"d_G={dg}, d_H={dh}, M={h.M}, e={e}")
            if dh / dg > lip_f:
                lip_f, wit_f = dh / dg, (u, v)
            if dg / dh > lip_i:
                lip_i, wit_i = dg / dh, (u, v)
    return DistortionReport(lip_f, lip_i, lip_f * lip_i, wit_f, wit_i,
                            pairs, exhaustive=True)


def _h_to_sub(h: GadgetGraph, sub: SubdividedGraph) -> np.ndarray:
    """Gadget vertex -> corresponding subdivided-graph vertex.

    Short-path vertices of u collapse onto the base vertex u; the k-th
    interior vertex of long path j maps to the k-th interior vertex of the
    subdivided edge j.
    """
    n_h = h.graph.n
    out = np.empty(n_h, dtype=np.int64)
    for u in range(h.base.n):
        out[h.short_ids[u]] = u
    for j in range(len(h.edge_list)):
        for k in range(h.M - 1):
            out[h.long_interior[j, k]] = sub.interior_id(j, k)
    return out


def product_positions(h: GadgetGraph, sub_positions: np.ndarray,
                      space: NormedSpace):
    """Images of gadget vertices in the l1 sum  space + R.

    sub_positions holds one row per vertex of subdivide(base, M) (same M and
    edge order as the gadget).  A short-path vertex with label i goes to
    (position of its base vertex, i); a long-path vertex goes to (position
    of its subdivided-edge vertex, label of its long path).  Positions are
    rescaled by the largest image distance across subdivided edges when that
    exceeds 1, so the result is 1-Lipschitz; the factor is returned.

    Returns (positions, factor, target_space, sub).
    """
    if h.M <= 2 * len(h.edge_list):
        raise ValidationError("need M > 2*e(base) for the product map")
    sub = subdivide(h.base, h.M)
    sub_positions = np.asarray(sub_positions, dtype=np.float64)
    if sub_positions.shape != (sub.graph.n, space.dim):
        raise ValidationError(
            f"positions shape {sub_positions.shape} does not match the "
            f"subdivided graph ({sub.graph.n} vertices, dim {space.dim})")

    edge_gaps = [float(norms(space, (sub_positions[a] - sub_positions[b])[None, :])[0])
                 for a, b in sub.graph.edges]
    factor = max(edge_gaps) if edge_gaps else 1.0
    pos = sub_positions / factor if factor > 1.0 else sub_positions
    factor = factor if factor > 1.0 else 1.0

    mapping = _h_to_sub(h, sub)
    n_h = h.graph.n
    out = np.empty((n_h, space.dim + 1))
    out[:, :space.dim] = pos[mapping]
    labels = np.empty(n_h)
    for u in range(h.base.n):
        labels[h.short_ids[u]] = np.arange(1, len(h.edge_list) + 1)
    for j in range(len(h.edge_list)):
        labels[h.long_interior[j]] = j + 1
    out[:, space.dim] = labels
    return out, factor, direct_sum_l1(space, lp_space(1, 1)), sub


@dataclass(frozen=True)
class ProductAudit:
    report: DistortionReport
    factor: float
    lip_positions_inverse: float
    inverse_bound: float
    forward_ok: bool
    inverse_ok: bool

    def to_json(self) -> dict:
        return {"report": self.report.to_json(), "normalization_factor": self.factor,
                "lip_positions_inverse": self.lip_positions_inverse,
                "inverse_bound": self.inverse_bound,
                "forward_ok": self.forward_ok, "inverse_ok": self.inverse_ok}


def audit_product_map(h: GadgetGraph, sub_positions: np.ndarray,
                      space: NormedSpace, pair_cap: int = 2000,
                      rng=None, tol: float = 1e-9) -> ProductAudit:
    """Audit the product map H -> space + R.

    Checks lip <= 1 (after normalization) and inverse lip <= 2x the inverse
    Lipschitz constant of the normalized positions on the subdivided graph.
    """
    pos, factor, target, sub = product_positions(h, sub_positions, space)
    scaled = sub_positions / factor
    sub_report = audit(FiniteMetric.from_graph(sub.graph),
                       FiniteMetric.from_points(space, scaled),
                       np.arange(sub.graph.n), pair_cap=pair_cap, rng=rng)
    lip0_inv = sub_report.lip_inverse
    report = audit(FiniteMetric.from_graph(h.graph),
                   FiniteMetric.from_points(target, pos),
                   np.arange(h.graph.n), pair_cap=pair_cap, rng=rng)
    bound = 2.0 * lip0_inv
    return ProductAudit(
        report=report, factor=factor, lip_positions_inverse=lip0_inv,
        inverse_bound=bound,
        forward_ok=report.lip_forward <= 1.0 + tol,
        inverse_ok=report.lip_inverse <= bound * (1 + tol),
    )


def verify_product_cases(h: GadgetGraph, sub_positions: np.ndarray,
                         space: NormedSpace, tol: float = 1e-9) -> bool:
    """Per-pair case split behind the inverse bound (small instances only).

    Pairs with d_sub(w', z') >= d_H(w, z)/2 must satisfy
    ||img(w) - img(z)|| >= d_H/(2 * lip_inv0); the remaining pairs must
    already satisfy ||img(w) - img(z)|| > d_H/2 through the label
    coordinate.
    """
    pos, factor, target, sub = product_positions(h, sub_positions, space)
    mapping = _h_to_sub(h, sub)
    d_h = bfs_apsp(h.graph)
    d_sub = bfs_apsp(sub.graph)
    scaled = sub_positions / factor
    sub_report = audit(FiniteMetric.from_graph(sub.graph),
                       FiniteMetric.from_points(space, scaled),
                       np.arange(sub.graph.n))
    lip0_inv = sub_report.lip_inverse
    n_h = h.graph.n
    for w in range(n_h):
        img_d = norms(target, pos - pos[w])
        for z in range(w + 1, n_h):
            dh = d_h[w, z]
            if d_sub[mapping[w], mapping[z]] >= 0.5 * dh:
                if img_d[z] < 0.5 * dh / lip0_inv * (1 - tol):
                    return False
            else:
                if img_d[z] < 0.5 * dh * (1 - tol):
                    return False
    return True


def gadget_to_json(h: GadgetGraph) -> dict:
    from .graphs import graph_to_json
    return {
        "graph": graph_to_json(h.graph),
        "base": graph_to_json(h.base),
        "M": h.M,
        "edge_order": [[u, v] for u, v in h.edge_list],
        "short_paths": [[int(x) for x in row] for row in h.short_ids],
        "long_paths": [[int(x) for x in row] for row in h.long_interior],
        "psi_anchor": h.psi_anchor,
        "metadata": {"short_path_vertices": len(h.edge_list),
                     "unlabeled_tail_dropped": True},
    }
