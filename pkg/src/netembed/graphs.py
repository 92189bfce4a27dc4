"""Unweighted simple graphs, exact shortest-path metrics, and the
bilipschitz-distortion auditor.

Hop distances are exact integers (BFS); distortion ratios are formed in
double precision.  The auditor is exhaustive over all vertex pairs up to a
configurable cap and switches to seeded source sampling above it, reporting
how many pairs it actually checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ValidationError
from .spaces import NormedSpace, norms


@dataclass(eq=False)
class Graph:
    """Simple undirected graph on vertices 0..n-1 with sorted adjacency."""

    n: int
    adj: tuple
    coords: Optional[np.ndarray] = None
    labels: Optional[tuple] = None
    _csr: Optional[tuple] = field(default=None, repr=False)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def csr(self):
        if self._csr is None:
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            for u in range(self.n):
                indptr[u + 1] = indptr[u] + len(self.adj[u])
            indices = np.empty(indptr[-1], dtype=np.int32)
            for u in range(self.n):
                indices[indptr[u]:indptr[u + 1]] = self.adj[u]
            self._csr = (indptr, indices)
        return self._csr


def from_edges(n: int, edges, coords=None, labels=None) -> Graph:
    """Build a Graph, rejecting loops and duplicate edges."""
    if n < 1:
        raise ValidationError("graph needs at least one vertex")
    adj = [set() for _ in range(n)]
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise ValidationError(f"loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise ValidationError(f"edge ({u},{v}) out of range for n={n}")
        if v in adj[u]:
            raise ValidationError(f"duplicate edge ({u},{v})")
        adj[u].add(v)
        adj[v].add(u)
    if coords is not None:
        coords = np.asarray(coords, dtype=np.float64)
        if coords.shape[0] != n:
            raise ValidationError("coords must have one row per vertex")
    return Graph(n, tuple(tuple(sorted(a)) for a in adj), coords=coords,
                 labels=tuple(labels) if labels is not None else None)


def bfs_from(g: Graph, source: int) -> np.ndarray:
    """Hop distances from source; -1 marks unreachable vertices."""
    indptr, indices = g.csr()
    dist = np.full(g.n, -1, dtype=np.int32)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int32)
    level = 0
    while frontier.size:
        level += 1
        starts = indptr[frontier]
        ends = indptr[frontier + 1]
        total = int(np.sum(ends - starts))
        if total == 0:
            break
        nbr = np.concatenate([indices[s:e] for s, e in zip(starts, ends)]) \
            if frontier.size > 1 else indices[starts[0]:ends[0]]
        nbr = nbr[dist[nbr] < 0]
        if nbr.size == 0:
            break
        nbr = np.unique(nbr)
        dist[nbr] = level
        frontier = nbr
    return dist


def bfs_apsp(g: Graph) -> np.ndarray:
    """All-pairs hop distances; raises on disconnected input."""
    table = np.empty((g.n, g.n), dtype=np.int32)
    for s in range(g.n):
        row = bfs_from(g, s)
        if np.any(row < 0):
            raise ValidationError("graph is disconnected")
        table[s] = row
    return table


def is_connected(g: Graph) -> bool:
    return bool(np.all(bfs_from(g, 0) >= 0))


def max_degree(g: Graph) -> int:
    return max(len(a) for a in g.adj)


class FiniteMetric:
    """A finite metric exposed as lazily computed distance rows."""

    def __init__(self, size: int, row_fn):
        self.size = size
        self._row_fn = row_fn
        self._cache: dict[int, np.ndarray] = {}

    def row(self, i: int) -> np.ndarray:
        r = self._cache.get(i)
        if r is None:
            r = self._row_fn(i)
            self._cache[i] = r
        return r

    def d(self, i: int, j: int) -> float:
        return float(self.row(i)[j])

    @staticmethod
    def from_graph(g: Graph) -> "FiniteMetric":
        def row(i):
            r = bfs_from(g, i)
            if np.any(r < 0):
                raise ValidationError("graph metric requires a connected graph")
            return r.astype(np.float64)
        return FiniteMetric(g.n, row)

    @staticmethod
    def from_points(space: NormedSpace, pts) -> "FiniteMetric":
        pts = np.asarray(pts, dtype=np.float64)
        return FiniteMetric(pts.shape[0], lambda i: norms(space, pts - pts[i]))


@dataclass(frozen=True)
class DistortionReport:
    lip_forward: float
    lip_inverse: float
    distortion: float
    witness_forward: tuple[int, int]
    witness_inverse: tuple[int, int]
    pairs_checked: int
    exhaustive: bool

    def to_json(self) -> dict:
        return {
            "lip_forward": self.lip_forward,
            "lip_inverse": self.lip_inverse,
            "distortion": self.distortion,
            "witness_forward": list(self.witness_forward),
            "witness_inverse": list(self.witness_inverse),
            "pairs_checked": self.pairs_checked,
            "exhaustive": self.exhaustive,
        }


def audit(source: FiniteMetric, target: FiniteMetric, vertex_map,
          pair_cap: int = 2000, rng: Optional[np.random.Generator] = None) -> DistortionReport:
    """Bilipschitz constants of i -> vertex_map[i] from source to target.

    lip_forward is the largest d_target/d_source ratio, lip_inverse the
    largest reciprocal; distortion is their product (scale invariant).
    Exhaustive over all pairs when source.size <= pair_cap, otherwise all
    pairs from a seeded sample of source vertices.
    """
    fmap = np.asarray(vertex_map, dtype=np.int64)
    if fmap.shape[0] != source.size:
        raise ValidationError("vertex_map must cover every source vertex")
    if len(set(fmap.tolist())) != source.size:
        raise ValidationError("vertex_map must be injective")
    if source.size < 2:
        raise ValidationError("audit needs at least two points")

    exhaustive = source.size <= pair_cap
    if exhaustive:
        sources = range(source.size)
    else:
        rng = rng or np.random.default_rng(0)
        want = max(2, min(source.size, (pair_cap * pair_cap) // source.size))
        sources = sorted(rng.choice(source.size, size=want, replace=False).tolist())

    lip_f, lip_i = 0.0, 0.0
    wit_f = wit_i = (0, 1)
    pairs = 0
    for i in sources:
        ds = source.row(i)
        dt = target.row(int(fmap[i]))[fmap]
        mask = np.ones(source.size, dtype=bool)
        mask[i] = False
        if exhaustive:
            mask[:i] = False  # each unordered pair once
        ds_m, dt_m = ds[mask], dt[mask]
        if ds_m.size == 0:
            continue
        if np.any(ds_m == 0):
            j = int(np.where(mask)[0][np.argmax(ds_m == 0)])
            raise ValidationError(f"zero source distance between distinct points {i},{j}")
        idx = np.where(mask)[0]
        pairs += idx.size
        with np.errstate(divide="ignore"):
            fwd = dt_m / ds_m
            inv = np.where(dt_m > 0, ds_m / dt_m, np.inf)
        k = int(np.argmax(fwd))
        if fwd[k] > lip_f:
            lip_f, wit_f = float(fwd[k]), (i, int(idx[k]))
        k = int(np.argmax(inv))
        if inv[k] > lip_i:
            lip_i, wit_i = float(inv[k]), (i, int(idx[k]))
    return DistortionReport(lip_f, lip_i, lip_f * lip_i, wit_f, wit_i,
                            pairs, exhaustive)


def audit_pair_rows(source: FiniteMetric, target: FiniteMetric, vertex_map):
    """Yield (u, v, d_source, d_target, ratio) over all pairs, for CSV export."""
    fmap = np.asarray(vertex_map, dtype=np.int64)
    for i in range(source.size):
        ds = source.row(i)
        dt = target.row(int(fmap[i]))[fmap]
        for j in range(i + 1, source.size):
            ratio = float(dt[j] / ds[j]) if ds[j] > 0 else float("inf")
            yield i, j, float(ds[j]), float(dt[j]), ratio


def write_audit_csv(path, source: FiniteMetric, target: FiniteMetric, vertex_map):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("pair_u,pair_v,d_source,d_target,ratio\n")
        for u, v, ds, dt, ratio in audit_pair_rows(source, target, vertex_map):
            fh.write(f"{u},{v},{ds!r},{dt!r},{ratio!r}\n")


# --- serialization ---------------------------------------------------------

def graph_to_json(g: Graph) -> dict:
    obj = {"n": g.n, "edges": [[u, v] for u, v in g.edges]}
    if g.coords is not None:
        obj["coords"] = [[float(x) for x in row] for row in g.coords]
    return obj


def graph_from_json(obj: dict) -> Graph:
    try:
        n = int(obj["n"])
        edges = [(int(u), int(v)) for u, v in obj["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed graph JSON: {exc}") from exc
    coords = obj.get("coords")
    return from_edges(n, edges, coords=coords)


def graph_to_dot(g: Graph, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for u in range(g.n):
        if g.coords is not None and g.coords.shape[1] == 2:
            x, y = g.coords[u]
            lines.append(f'  {u} [pos="{x},{y}!"];')
        else:
            lines.append(f"  {u};")
    for u, v in g.edges:
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
