"""Randomized polyline embedding of the thickened net graph into its space.

Each graph edge uv (working at the unit scale: separation 1, edge lengths
<= 3) is realized as two line segments [u, w] and [w, v], with the
breakpoint w drawn uniformly from the ball of radius mu around the midpoint
until three avoidance conditions hold against everything placed earlier:

  alpha  where the curve crosses the sphere of radius beta around each of
         its endpoints, the crossing point stays at least alpha away from
         the crossings of previously placed segments on the same sphere;
  beta   the curve stays at least beta away from every other vertex;
  gamma  outside the beta-balls of the vertices, distinct curves stay at
         least gamma apart.

All predicate comparisons are tolerance inflated (pass needs the constraint
plus the tolerance), and distance decisions are certified: a cheap
closed-form Euclidean bound screens each test through the space's norm
comparison factors, and only the genuinely close cases fall through to the
exact convex searches.  Floating error can therefore reject a usable
breakpoint but never accept a bad one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import PlacementError, ValidationError
from .gadgets import SubdividedGraph, subdivide
from .graphs import Graph, bfs_apsp
from .net_graphs import (NetGraph, net_graph_from_json, net_graph_to_json,
                         rescaled_unit)
from .spaces import (PARAM_TOL, NormedSpace, Segment, _ternary_batch, norms,
                     sample_ball_many, segment_ball_clip)

_Z95 = 1.959963984540054


# --- parameters -------------------------------------------------------------

@dataclass(frozen=True)
class EmbedParams:
    """Placement constants.  mu is the breakpoint ball radius; alpha, beta,
    gamma control the three avoidance conditions.  gamma_constant records
    the convention used for the free constant in the strict gamma bound."""

    alpha: float
    beta: float
    gamma: float
    mu: float = 0.25
    mode: str = "practical"
    retry_cap: int = 10_000
    seed: int = 0
    tolerance: float = 1e-9
    gamma_constant: float = 1.0

    def validate(self, dim: int) -> None:
        if dim < 3:
            raise ValidationError("edge placement needs dimension >= 3")
        if not (self.mu > 0):
            raise ValidationError("mu must be positive")
        if not (0 < self.gamma and 0 < self.alpha and 0 < self.beta):
            raise ValidationError("alpha, beta, gamma must be positive")
        if self.mode == "strict":
            ok = (self.alpha <= self.beta / 1232 * (1 + 1e-12)
                  and self.beta <= self.mu / 546 * (1 + 1e-12)
                  and self.gamma <= (self.beta * self.mu) ** 2 / 968 * (1 + 1e-12)
                  and self.gamma <= self.beta / 20
                  and self.gamma <= self.alpha
                  and max(self.alpha, self.beta, self.gamma) < 0.25
                  and self.beta < self.mu / 5)
            if not ok:
                raise ValidationError("strict-mode constants violate the required chain")
        elif self.mode == "practical":
            if not (self.gamma <= self.beta < self.mu and self.alpha <= self.beta):
                raise ValidationError("practical mode needs gamma, alpha <= beta < mu")
        else:
            raise ValidationError(f"unknown mode {self.mode!r}")

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma,
                "mu": self.mu, "mode": self.mode, "retry_cap": self.retry_cap,
                "seed": self.seed, "tolerance": self.tolerance,
                "gamma_constant": self.gamma_constant}


def default_strict_params(dim: int, seed: int = 0) -> EmbedParams:
    """The strict constants: beta = mu/546, alpha = beta/1232, and gamma the
    smallest of alpha, beta/20 and (beta*mu)^2/968 (free constant taken as
    1; smaller gamma only shrinks the excluded volume)."""
    if dim < 3:
        raise ValidationError("strict parameters need dimension >= 3")
    mu = 0.25
    beta = mu / 546
    alpha = beta / 1232
    gamma = min(alpha, beta / 20, (beta * mu) ** 2 / 968)
    return EmbedParams(alpha=alpha, beta=beta, gamma=gamma, mu=mu,
                       mode="strict", seed=seed)


def practical_params(beta: float = 0.02, seed: int = 0) -> EmbedParams:
    """Looser constants for runs where the strict chain would make the
    audited inverse bound astronomically large."""
    return EmbedParams(alpha=beta / 10, beta=beta, gamma=beta / 20,
                       mode="practical", seed=seed)


def params_from_json(obj: dict) -> EmbedParams:
    try:
        return EmbedParams(
            alpha=float(obj["alpha"]), beta=float(obj["beta"]),
            gamma=float(obj["gamma"]), mu=float(obj["mu"]),
            mode=str(obj["mode"]), retry_cap=int(obj["retry_cap"]),
            seed=int(obj["seed"]), tolerance=float(obj["tolerance"]),
            gamma_constant=float(obj.get("gamma_constant", 1.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed params JSON: {exc}") from exc


# --- Euclidean closed forms (screening kernels) -----------------------------

def _l2_point_to_segments(p: np.ndarray, segs: np.ndarray) -> np.ndarray:
    """Euclidean distance from one point to many segments, (m,2,n) -> (m,)."""
    a = segs[:, 0, :]
    d = segs[:, 1, :] - a
    dd = np.einsum("ij,ij->i", d, d)
    t = np.clip(np.einsum("ij,ij->i", p - a, d) / np.maximum(dd, 1e-300), 0.0, 1.0)
    diff = a + t[:, None] * d - p
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def _l2_points_to_segment(pts: np.ndarray, a: np.ndarray, b: np.ndarray):
    """Euclidean distance from many points to one segment, returns (dist, t)."""
    d = b - a
    dd = float(d @ d)
    t = np.clip((pts - a) @ d / max(dd, 1e-300), 0.0, 1.0)
    diff = a + t[:, None] * d - pts
    return np.sqrt(np.einsum("ij,ij->i", diff, diff)), t


def _l2_segment_to_segments(seg: np.ndarray, others: np.ndarray) -> np.ndarray:
    """Euclidean segment-segment distances, seg (2,n) vs others (m,2,n).

    The squared objective is a convex quadratic over the unit box, so the
    minimum is either the clamped stationary point or lies on one of the
    four box edges; all five candidates are evaluated.
    """
    p0, u = seg[0], seg[1] - seg[0]
    q0 = others[:, 0, :]
    v = others[:, 1, :] - q0
    w0 = p0 - q0
    a = max(float(u @ u), 1e-300)
    b = v @ u
    c = np.maximum(np.einsum("ij,ij->i", v, v), 1e-300)
    d = w0 @ u
    e = np.einsum("ij,ij->i", v, w0)
    denom = a * c - b * b
    safe = np.maximum(denom, 1e-300)
    cand_s = [np.clip((b * e - c * d) / safe, 0.0, 1.0)]
    cand_t = [np.clip((a * e - b * d) / safe, 0.0, 1.0)]
    for s_fix in (0.0, 1.0):
        cand_s.append(np.full(q0.shape[0], s_fix))
        cand_t.append(np.clip((e + b * s_fix) / c, 0.0, 1.0))
    for t_fix in (0.0, 1.0):
        cand_t.append(np.full(q0.shape[0], t_fix))
        cand_s.append(np.clip((b * t_fix - d) / a, 0.0, 1.0))
    best = None
    for s, t in zip(cand_s, cand_t):
        diff = w0 + s[:, None] * u - t[:, None] * v
        val = np.einsum("ij,ij->i", diff, diff)
        best = val if best is None else np.minimum(best, val)
    return np.sqrt(best)


# --- certified generic kernels ----------------------------------------------

def _point_to_segments_min(space: NormedSpace, p: np.ndarray,
                           segs: np.ndarray, iters: int = 52) -> np.ndarray:
    """Exact (to PARAM_TOL) norm distance from one point to many segments."""
    a = segs[:, 0, :]
    d = segs[:, 1, :] - a

    def f(t):
        return norms(space, a + t[:, None] * d - p)

    m = segs.shape[0]
    _, val = _ternary_batch(f, np.zeros(m), np.ones(m), iters)
    return val


def _segment_to_segments_min(space: NormedSpace, seg: np.ndarray,
                             others: np.ndarray, iters: int = 52) -> np.ndarray:
    """Nested ternary search on the jointly convex objective, batched over
    the second family.  Returns feasible values (upper bounds) within
    (L1 + L2) * (2/3)^iters of the true minima."""
    a1, d1 = seg[0], seg[1] - seg[0]
    oa = others[:, 0, :]
    od = others[:, 1, :] - oa
    m = others.shape[0]

    def g(svals):
        pts = a1 + svals[:, None] * d1

        def f(tvals):
            return norms(space, oa + tvals[:, None] * od - pts)

        _, val = _ternary_batch(f, np.zeros(m), np.ones(m), iters)
        return val

    _, val = _ternary_batch(g, np.zeros(m), np.ones(m), iters)
    return val


def _is_l2(space: NormedSpace) -> bool:
    return space.kind == "lp" and space.p == 2.0


def _segments_clear(space: NormedSpace, seg: np.ndarray, others: np.ndarray,
                    threshold: float, tol: float) -> bool:
    """Certified: True only when every segment in `others` is at norm
    distance >= threshold + tol from `seg`."""
    if others.shape[0] == 0:
        return True
    l2 = _l2_segment_to_segments(seg, others)
    if _is_l2(space):
        return bool(np.all(l2 >= threshold + tol))
    need = threshold + tol
    rest = ~(l2 * space.l2_lower >= need) if space.l2_lower > 0 \
        else np.ones(others.shape[0], dtype=bool)
    if not np.any(rest):
        return True
    if space.l2_upper < math.inf and np.any(l2[rest] * space.l2_upper < need):
        return False
    sub = others[rest]
    lens = norms(space, sub[:, 1, :] - sub[:, 0, :])
    l_seg = float(norms(space, (seg[1] - seg[0])[None, :])[0])
    for iters in (22, 52):
        val = _segment_to_segments_min(space, seg, sub, iters)
        err = (l_seg + lens) * ((2.0 / 3.0) ** iters + 4 * PARAM_TOL)
        if np.any(val < need):          # feasible values are upper bounds
            return False
        if np.all(val - err >= need):
            return True
    return False  # undecided at full precision: reject conservatively


def _points_clear_of_segment(space: NormedSpace, pts: np.ndarray,
                             a: np.ndarray, b: np.ndarray,
                             threshold: float, tol: float) -> bool:
    """Certified: all points at norm distance >= threshold + tol from [a,b]."""
    if pts.shape[0] == 0:
        return True
    l2, _ = _l2_points_to_segment(pts, a, b)
    if _is_l2(space):
        return bool(np.all(l2 >= threshold + tol))
    need = threshold + tol
    rest = ~(l2 * space.l2_lower >= need) if space.l2_lower > 0 \
        else np.ones(pts.shape[0], dtype=bool)
    if not np.any(rest):
        return True
    if space.l2_upper < math.inf and np.any(l2[rest] * space.l2_upper < need):
        return False
    # exact distance from each remaining point to the fixed segment
    d = b - a

    def f(t):
        return norms(space, a + t[:, None] * d - pts[rest])

    m = int(np.sum(rest))
    _, vals = _ternary_batch(f, np.zeros(m), np.ones(m))
    l_seg = float(norms(space, (b - a)[None, :])[0])
    err = l_seg * 6 * PARAM_TOL
    if np.any(vals < need):
        return False
    return bool(np.all(vals - err >= need))


# --- placement state ---------------------------------------------------------

class _PlacedState:
    """Segments, clipped pieces, and sphere crossings of the placed prefix."""

    def __init__(self, space: NormedSpace, points: np.ndarray, beta: float):
        self.space = space
        self.points = points
        self.beta = beta
        self.segments: list[np.ndarray] = []       # full placed segments (2,n)
        self.clipped: list[np.ndarray] = []        # pieces outside the beta balls
        self.crossings: dict[int, list[np.ndarray]] = {}
        self._seg_cache: Optional[np.ndarray] = None
        self._clip_cache: Optional[np.ndarray] = None

    def segment_array(self) -> np.ndarray:
        if self._seg_cache is None or self._seg_cache.shape[0] != len(self.segments):
            self._seg_cache = (np.stack(self.segments) if self.segments
                               else np.empty((0, 2, self.space.dim)))
        return self._seg_cache

    def clipped_array(self) -> np.ndarray:
        if self._clip_cache is None or self._clip_cache.shape[0] != len(self.clipped):
            self._clip_cache = (np.stack(self.clipped) if self.clipped
                                else np.empty((0, 2, self.space.dim)))
        return self._clip_cache

    def crossing_array(self, vertex: int) -> np.ndarray:
        pts = self.crossings.get(vertex, [])
        return np.stack(pts) if pts else np.empty((0, self.space.dim))

    def add_edge(self, u_idx: int, v_idx: int, u: np.ndarray, v: np.ndarray,
                 w: np.ndarray) -> None:
        seg_uw = np.stack([u, w])
        seg_wv = np.stack([w, v])
        self.segments.extend([seg_uw, seg_wv])
        for piece in _clip_curve(self.space, u, v, w, self.beta):
            self.clipped.append(piece)
        du = float(norms(self.space, (w - u)[None, :])[0])
        dv = float(norms(self.space, (w - v)[None, :])[0])
        self.crossings.setdefault(u_idx, []).append(u + (self.beta / du) * (w - u))
        self.crossings.setdefault(v_idx, []).append(v + (self.beta / dv) * (w - v))
        self._seg_cache = None
        self._clip_cache = None


def _subtract_interval(intervals, cut):
    lo, hi = cut
    out = []
    for (a, b) in intervals:
        if hi <= a or lo >= b:
            out.append((a, b))
            continue
        if lo > a:
            out.append((a, lo))
        if hi < b:
            out.append((hi, b))
    return out


def _clip_curve(space: NormedSpace, u: np.ndarray, v: np.ndarray,
                w: np.ndarray, beta: float) -> list[np.ndarray]:
    """Pieces of [u,w] and [w,v] outside B(u, beta) and B(v, beta).

    The beta condition keeps the curve clear of every other vertex's ball,
    so only the edge's own endpoints can clip it.  Each segment yields at
    most three pieces.
    """
    pieces = []
    for (a, b), own, other in ((np.stack([u, w]), u, v), (np.stack([w, v]), v, u)):
        length = float(norms(space, (b - a)[None, :])[0])
        if length < 1e-12:
            continue
        intervals = [(0.0, 1.0)]
        # own-endpoint ball: the segment leaves it radially
        if np.array_equal(a, own):
            intervals = _subtract_interval(intervals, (0.0, min(1.0, beta / length)))
        elif np.array_equal(b, own):
            intervals = _subtract_interval(intervals, (max(0.0, 1 - beta / length), 1.0))
        # other-endpoint ball: screen first, clip exactly when it could touch
        l2, _ = _l2_points_to_segment(other[None, :], a, b)
        if not (float(l2[0]) * space.l2_lower > beta):
            cut = segment_ball_clip(space, a, b, other, beta)
            if cut is not None:
                intervals = _subtract_interval(intervals, cut)
        for (t0, t1) in intervals:
            if t1 - t0 > 1e-12:
                pieces.append(np.stack([a + t0 * (b - a), a + t1 * (b - a)]))
    return pieces


# --- the three conditions ----------------------------------------------------

def check_alpha(space: NormedSpace, u_idx: int, v_idx: int, u: np.ndarray,
                v: np.ndarray, w: np.ndarray, state: _PlacedState,
                params: EmbedParams) -> bool:
    """Sphere-crossing separation at both endpoints.

    Requires the curve to meet each endpoint ball in a single radial
    segment (the far segment must stay clear), then compares the crossing
    point against the cached crossings of previously placed segments.  Only
    incident segments can cross: every other placed curve passed its beta
    check and stays at distance > beta from this vertex.
    """
    beta, alpha, tol = params.beta, params.alpha, params.tolerance
    du = float(norms(space, (w - u)[None, :])[0])
    dv = float(norms(space, (w - v)[None, :])[0])
    if du <= beta + tol or dv <= beta + tol:
        return False
    # the opposite segment must not re-enter the ball
    if not _points_clear_of_segment(space, u[None, :], w, v, beta, tol):
        return False
    if not _points_clear_of_segment(space, v[None, :], u, w, beta, tol):
        return False
    for idx, x in ((u_idx, u + (beta / du) * (w - u)),
                   (v_idx, v + (beta / dv) * (w - v))):
        placed = state.crossing_array(idx)
        if placed.shape[0] and float(np.min(norms(space, placed - x))) < alpha + tol:
            return False
    return True


def check_beta(space: NormedSpace, u: np.ndarray, v: np.ndarray,
               w: np.ndarray, points: np.ndarray, params: EmbedParams,
               near_mask: np.ndarray) -> bool:
    """Both segments stay at distance >= beta from every other vertex.

    near_mask preselects vertices within norm distance 5 of u; farther ones
    cannot interfere with a curve of length under 4.
    """
    others = points[near_mask]
    if others.shape[0] == 0:
        return True
    tol = params.tolerance
    return (_points_clear_of_segment(space, others, u, w, params.beta, tol)
            and _points_clear_of_segment(space, others, w, v, params.beta, tol))


def check_gamma(space: NormedSpace, u: np.ndarray, v: np.ndarray,
                w: np.ndarray, state: _PlacedState, params: EmbedParams) -> bool:
    """Clearance between curve interiors.

    The candidate's pieces outside the beta balls must stay gamma away from
    every placed segment, and the placed curves' clipped pieces must stay
    gamma away from the whole candidate.
    """
    gamma, tol = params.gamma, params.tolerance
    placed = state.segment_array()
    if placed.shape[0] == 0:
        return True
    for piece in _clip_curve(space, u, v, w, params.beta):
        if not _segments_clear(space, piece, placed, gamma, tol):
            return False
    clipped = state.clipped_array()
    for seg in (np.stack([u, w]), np.stack([w, v])):
        if not _segments_clear(space, seg, clipped, gamma, tol):
            return False
    return True


# --- the embedding -----------------------------------------------------------

class TGPoint(NamedTuple):
    """A point of the thickened graph: position t in [0,1] along an edge."""

    edge: int
    t: float


class ThickenedGraph:
    """Shortest-curve metric on the union of unit edges of a graph."""

    def __init__(self, graph: Graph):
        self.graph = graph
        self.edge_list = tuple(graph.edges)
        self.hops = bfs_apsp(graph).astype(np.float64)
        self._incident = {}
        for j, (a, b) in enumerate(self.edge_list):
            self._incident.setdefault(a, (j, 0.0))
            self._incident.setdefault(b, (j, 1.0))

    def vertex_point(self, u: int) -> TGPoint:
        j, t = self._incident[u]
        return TGPoint(j, t)

    def distance(self, p: TGPoint, q: TGPoint) -> float:
        if not (0.0 <= p.t <= 1.0 and 0.0 <= q.t <= 1.0):
            raise ValidationError("TG parameter must lie in [0, 1]")
        (pu, pv), (qu, qv) = self.edge_list[p.edge], self.edge_list[q.edge]
        best = abs(p.t - q.t) if p.edge == q.edge else math.inf
        for off_p, end_p in ((p.t, pu), (1.0 - p.t, pv)):
            for off_q, end_q in ((q.t, qu), (1.0 - q.t, qv)):
                best = min(best, off_p + float(self.hops[end_p, end_q]) + off_q)
        return best


def tg_distance(graph, p: TGPoint, q: TGPoint) -> float:
    """Shortest-curve distance between two thickened-graph points.

    Convenience wrapper; hold a ThickenedGraph when querying many pairs, the
    hop table is rebuilt on every call here.
    """
    target = graph.graph if hasattr(graph, "graph") else graph
    return ThickenedGraph(target).distance(p, q)


@dataclass
class PolylineEmbedding:
    """Per-edge two-segment curves realizing the thickened graph in space.

    Coordinates are at the unit scale (the input net graph rescaled by
    1/rho, recorded in `scale`); edge j runs [u, w_j] then [w_j, v] for the
    j-th edge of the graph in lexicographic order.
    """

    netgraph: NetGraph
    params: EmbedParams
    edge_list: tuple
    breakpoints: np.ndarray
    attempts: np.ndarray
    scale: float

    @property
    def space(self) -> NormedSpace:
        return self.netgraph.space

    def curve(self, j: int):
        u, v = self.edge_list[j]
        pts = self.netgraph.points
        return pts[u], self.breakpoints[j], pts[v]

    def curve_length(self, j: int) -> float:
        u, w, v = self.curve(j)
        return (float(norms(self.space, (w - u)[None, :])[0])
                + float(norms(self.space, (v - w)[None, :])[0]))

    def point_at(self, j: int, t: float) -> np.ndarray:
        """Arclength parametrization: t in [0,1] along the two segments."""
        u, w, v = self.curve(j)
        if t <= 0.0:
            return u.copy()
        if t >= 1.0:
            return v.copy()
        l1 = float(norms(self.space, (w - u)[None, :])[0])
        l2 = float(norms(self.space, (v - w)[None, :])[0])
        s = t * (l1 + l2)
        if s <= l1:
            return u + (s / l1) * (w - u)
        return w + ((s - l1) / l2) * (v - w)

    def position(self, p: TGPoint) -> np.ndarray:
        return self.point_at(p.edge, p.t)


def place_edges(space: NormedSpace, ng: NetGraph, params: EmbedParams,
                rng: np.random.Generator,
                edge_limit: Optional[int] = None) -> PolylineEmbedding:
    """Place curves edge by edge in lexicographic order.

    The net graph is first rescaled to the unit normal form (separation 1,
    edge threshold 3) so the constants in params mean what they should.
    Each edge rejection-samples w in the ball of radius mu around the
    midpoint until the alpha, beta and gamma checks all pass.
    """
    if space.dim < 3:
        raise ValidationError("edge placement needs dimension >= 3")
    params.validate(space.dim)
    ng_unit, scale = rescaled_unit(ng)
    pts = ng_unit.points
    edges = ng_unit.graph.edges
    if edge_limit is not None:
        edges = edges[:edge_limit]

    state = _PlacedState(space, pts, params.beta)
    breakpoints = np.empty((len(edges), space.dim))
    attempts = np.zeros(len(edges), dtype=np.int64)
    for j, (ui, vi) in enumerate(edges):
        u, v = pts[ui], pts[vi]
        z = 0.5 * (u + v)
        near = norms(space, pts - u) <= 5.0
        near[ui] = near[vi] = False
        tally = {"alpha": 0, "beta": 0, "gamma": 0}
        placed = False
        for _ in range(params.retry_cap):
            w = sample_ball_many(space, z, params.mu, 1, rng)[0]
            attempts[j] += 1
            if not check_alpha(space, ui, vi, u, v, w, state, params):
                tally["alpha"] += 1
                continue
            if not check_beta(space, u, v, w, pts, params, near):
                tally["beta"] += 1
                continue
            if not check_gamma(space, u, v, w, state, params):
                tally["gamma"] += 1
                continue
            breakpoints[j] = w
            state.add_edge(ui, vi, u, v, w)
            placed = True
            break
        if not placed:
            raise PlacementError((ui, vi), int(attempts[j]), tally)
    return PolylineEmbedding(netgraph=ng_unit, params=params,
                             edge_list=tuple(edges), breakpoints=breakpoints,
                             attempts=attempts, scale=scale)


def verify_embedding(emb: PolylineEmbedding) -> dict:
    """Re-run the three conditions for every edge against the prefix placed
    before it (the construction order), from a freshly built state."""
    space = emb.space
    pts = emb.netgraph.points
    state = _PlacedState(space, pts, emb.params.beta)
    failures = []
    for j, (ui, vi) in enumerate(emb.edge_list):
        u, v, w = pts[ui], pts[vi], emb.breakpoints[j]
        near = norms(space, pts - u) <= 5.0
        near[ui] = near[vi] = False
        checks = {
            "alpha": check_alpha(space, ui, vi, u, v, w, state, emb.params),
            "beta": check_beta(space, u, v, w, pts, emb.params, near),
            "gamma": check_gamma(space, u, v, w, state, emb.params),
        }
        if not all(checks.values()):
            failures.append({"edge": [ui, vi],
                             "failed": [k for k, v_ in checks.items() if not v_]})
        state.add_edge(ui, vi, u, v, w)
    return {"ok": not failures, "edges_checked": len(emb.edge_list),
            "failures": failures}


# --- derived objects and audits ----------------------------------------------

def mg_positions(emb: PolylineEmbedding, M: int):
    """Positions for the M-fold subdivision: the step-k vertex of edge uv
    sits at arclength fraction k/M along the edge's curve; original
    vertices map to themselves.  Returns (SubdividedGraph, positions)."""
    if M < 1:
        raise ValidationError("M must be >= 1")
    g = emb.netgraph.graph
    if len(emb.edge_list) != g.edge_count:
        raise ValidationError("mg_positions needs a fully placed embedding")
    sub = subdivide(g, M)
    pos = np.empty((sub.graph.n, emb.space.dim))
    pos[:g.n] = emb.netgraph.points
    for j in range(len(emb.edge_list)):
        for k in range(1, M):
            pos[sub.interior_id(j, k - 1)] = emb.point_at(j, k / M)
    return sub, pos


def subdivision_tg_points(sub: SubdividedGraph, tg: ThickenedGraph) -> list[TGPoint]:
    """The thickened-graph point carried by each subdivision vertex."""
    out = []
    for vid in range(sub.graph.n):
        kind = sub.vertex_kind(vid)
        if kind[0] == "orig":
            out.append(tg.vertex_point(kind[1]))
        else:
            _, j, step = kind
            out.append(TGPoint(j, step / sub.M))
    return out


@dataclass(frozen=True)
class TgAudit:
    lip_forward: float
    lip_inverse: float
    distortion: float
    forward_bound: float
    inverse_bound: float
    forward_ok: bool
    inverse_ok: bool
    vertex_pairs: int
    interior_pairs: int
    max_curve_length: float

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in
                ("lip_forward", "lip_inverse", "distortion", "forward_bound",
                 "inverse_bound", "forward_ok", "inverse_ok", "vertex_pairs",
                 "interior_pairs", "max_curve_length")}


def audit_tg(emb: PolylineEmbedding, interior_samples: int,
             rng: np.random.Generator) -> TgAudit:
    """Distortion audit of the thickened-graph embedding.

    Evaluates the ratio d_TG / image distance (and its reciprocal) over all
    vertex pairs plus sampled interior point pairs, against the bounds
    lip <= 4 and inverse lip <= 1 + 6/gamma.
    """
    space = emb.space
    g = emb.netgraph.graph
    tg = ThickenedGraph(g)
    pts = emb.netgraph.points
    lip_f = lip_i = 0.0
    vpairs = 0
    for i in range(g.n):
        d_img = norms(space, pts[i + 1:] - pts[i])
        d_tg = tg.hops[i, i + 1:]
        vpairs += d_img.size
        if d_img.size:
            lip_f = max(lip_f, float(np.max(d_img / d_tg)))
            lip_i = max(lip_i, float(np.max(d_tg / d_img)))
    n_edges = len(emb.edge_list)
    done = 0
    while done < interior_samples:
        k = min(4096, interior_samples - done)
        e_idx = rng.integers(0, n_edges, size=(k, 2))
        t_val = rng.uniform(0.0, 1.0, size=(k, 2))
        for (e1, e2), (t1, t2) in zip(e_idx, t_val):
            p, q = TGPoint(int(e1), float(t1)), TGPoint(int(e2), float(t2))
            d_tg = tg.distance(p, q)
            if d_tg < 1e-12:
                continue
            d_img = float(norms(space, (emb.position(p) - emb.position(q))[None, :])[0])
            lip_f = max(lip_f, d_img / d_tg)
            if d_img > 0:
                lip_i = max(lip_i, d_tg / d_img)
            else:
                lip_i = math.inf
        done += k
    inv_bound = 1.0 + 6.0 / emb.params.gamma
    max_len = max(emb.curve_length(j) for j in range(n_edges))
    return TgAudit(
        lip_forward=lip_f, lip_inverse=lip_i, distortion=lip_f * lip_i,
        forward_bound=4.0, inverse_bound=inv_bound,
        forward_ok=lip_f <= 4.0, inverse_ok=lip_i <= inv_bound,
        vertex_pairs=vpairs, interior_pairs=interior_samples,
        max_curve_length=max_len)


# --- Monte Carlo volume estimate ----------------------------------------------

@dataclass(frozen=True)
class FractionEstimate:
    fraction: float
    ci_low: float
    ci_high: float
    half_width: float
    samples: int
    successes: int

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in
                ("fraction", "ci_low", "ci_high", "half_width", "samples",
                 "successes")}


def wilson_interval(successes: int, samples: int, z: float = _Z95):
    """Wilson score interval; returns (center, half_width)."""
    if samples < 1:
        raise ValidationError("need at least one sample")
    phat = successes / samples
    denom = 1.0 + z * z / samples
    center = (phat + z * z / (2 * samples)) / denom
    half = z * math.sqrt(phat * (1 - phat) / samples
                         + z * z / (4 * samples * samples)) / denom
    return center, half


def estimate_suitable_fraction(emb: PolylineEmbedding, edge_index: int,
                               samples: int, rng: np.random.Generator) -> FractionEstimate:
    """Monte Carlo fraction of breakpoints w in B(midpoint, mu) that satisfy
    all three conditions for the given edge against the prefix placed before
    it, with a 95% Wilson interval."""
    if not (0 <= edge_index < len(emb.edge_list)):
        raise ValidationError("edge_index outside the placed edge list")
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    space = emb.space
    pts = emb.netgraph.points
    params = emb.params
    state = _PlacedState(space, pts, params.beta)
    for j in range(edge_index):
        ui, vi = emb.edge_list[j]
        state.add_edge(ui, vi, pts[ui], pts[vi], emb.breakpoints[j])
    ui, vi = emb.edge_list[edge_index]
    u, v = pts[ui], pts[vi]
    z_mid = 0.5 * (u + v)
    near = norms(space, pts - u) <= 5.0
    near[ui] = near[vi] = False

    ws = sample_ball_many(space, z_mid, params.mu, samples, rng)
    if _is_l2(space):
        good = _suitable_mask_l2(space, ui, vi, u, v, ws, pts, near, state, params)
        successes = int(np.sum(good))
    else:
        successes = 0
        for w in ws:
            if (check_alpha(space, ui, vi, u, v, w, state, params)
                    and check_beta(space, u, v, w, pts, params, near)
                    and check_gamma(space, u, v, w, state, params)):
                successes += 1
    center, half = wilson_interval(successes, samples)
    return FractionEstimate(fraction=successes / samples,
                            ci_low=max(0.0, center - half),
                            ci_high=min(1.0, center + half),
                            half_width=half, samples=samples,
                            successes=successes)


def _suitable_mask_l2(space, ui, vi, u, v, ws, pts, near_mask, state, params):
    """Vectorized three-condition predicate for Euclidean spaces."""
    m = ws.shape[0]
    tol = params.tolerance
    beta, alpha, gamma = params.beta, params.alpha, params.gamma
    ok = np.ones(m, dtype=bool)

    du = np.linalg.norm(ws - u, axis=1)
    dv = np.linalg.norm(ws - v, axis=1)
    ok &= (du > beta + tol) & (dv > beta + tol)

    segs_uw = np.stack([np.broadcast_to(u, ws.shape), ws], axis=1)
    segs_wv = np.stack([ws, np.broadcast_to(v, ws.shape)], axis=1)
    # alpha premise: the far segment stays out of each endpoint ball
    ok &= _l2_point_to_segments(u, segs_wv) >= beta + tol
    ok &= _l2_point_to_segments(v, segs_uw) >= beta + tol
    # alpha separation at both spheres
    for idx, center_pt, dd in ((ui, u, du), (vi, v, dv)):
        placed = state.crossing_array(idx)
        if placed.shape[0] == 0:
            continue
        x = center_pt + (beta / np.maximum(dd, 1e-300))[:, None] * (ws - center_pt)
        for cp in placed:
            ok &= np.linalg.norm(x - cp, axis=1) >= alpha + tol
    # beta: every other nearby vertex clears both segments
    for p in pts[near_mask]:
        ok &= _l2_point_to_segments(p, segs_uw) >= beta + tol
        ok &= _l2_point_to_segments(p, segs_wv) >= beta + tol
    # gamma, candidate pieces against placed segments.  Clipping only
    # happens at the edge's own endpoint balls: samples whose far segment
    # dips into the opposite ball were already rejected by the alpha
    # premise above, and the beta condition keeps every other ball clear.
    placed_segs = state.segment_array()
    clipped = state.clipped_array()
    if placed_segs.shape[0] == 0:
        return ok
    t_u = np.minimum(1.0, beta / np.maximum(du, 1e-300))
    t_v = np.minimum(1.0, beta / np.maximum(dv, 1e-300))
    piece_uw = np.stack([u + t_u[:, None] * (ws - u), ws], axis=1)
    piece_wv = np.stack([ws, v + t_v[:, None] * (ws - v)], axis=1)
    for segs in (piece_uw, piece_wv):
        for k in range(placed_segs.shape[0]):
            ok &= _l2_seg_to_seg_batch(segs, placed_segs[k]) >= gamma + tol
    for segs in (segs_uw, segs_wv):
        for k in range(clipped.shape[0]):
            ok &= _l2_seg_to_seg_batch(segs, clipped[k]) >= gamma + tol
    return ok


def _l2_seg_to_seg_batch(segs: np.ndarray, other: np.ndarray) -> np.ndarray:
    """Euclidean distance from each segment in segs (m,2,n) to one fixed
    segment (2,n)."""
    p0 = segs[:, 0, :]
    uvec = segs[:, 1, :] - p0
    q0, q1 = other[0], other[1]
    vvec = q1 - q0
    w0 = p0 - q0
    a = np.maximum(np.einsum("ij,ij->i", uvec, uvec), 1e-300)
    b = uvec @ vvec
    c = max(float(vvec @ vvec), 1e-300)
    d = np.einsum("ij,ij->i", w0, uvec)
    e = w0 @ vvec
    denom = a * c - b * b
    safe = np.maximum(denom, 1e-300)
    cand = [(np.clip((b * e - c * d) / safe, 0, 1), np.clip((a * e - b * d) / safe, 0, 1))]
    for s_fix in (0.0, 1.0):
        s = np.full(p0.shape[0], s_fix)
        cand.append((s, np.clip((e + b * s_fix) / c, 0, 1)))
    for t_fix in (0.0, 1.0):
        t = np.full(p0.shape[0], t_fix)
        cand.append((np.clip((b * t_fix - d) / a, 0, 1), t))
    best = None
    for s, t in cand:
        diff = w0 + s[:, None] * uvec - t[:, None] * vvec
        val = np.einsum("ij,ij->i", diff, diff)
        best = val if best is None else np.minimum(best, val)
    return np.sqrt(best)


# --- serialization -------------------------------------------------------------

def embedding_to_json(emb: PolylineEmbedding) -> dict:
    return {
        "net_graph": net_graph_to_json(emb.netgraph),
        "params": emb.params.to_json(),
        "scale": emb.scale,
        "edges": [{"u": int(u), "v": int(v),
                   "w": [float(x) for x in emb.breakpoints[j]],
                   "attempts": int(emb.attempts[j])}
                  for j, (u, v) in enumerate(emb.edge_list)],
    }


def embedding_from_json(obj: dict) -> PolylineEmbedding:
    try:
        ng = net_graph_from_json(obj["net_graph"])
        params = params_from_json(obj["params"])
        scale = float(obj["scale"])
        edge_list = tuple((int(e["u"]), int(e["v"])) for e in obj["edges"])
        breakpoints = np.array([[float(x) for x in e["w"]] for e in obj["edges"]])
        attempts = np.array([int(e["attempts"]) for e in obj["edges"]], dtype=np.int64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed embedding JSON: {exc}") from exc
    return PolylineEmbedding(netgraph=ng, params=params, edge_list=edge_list,
                             breakpoints=breakpoints, attempts=attempts,
                             scale=scale)
