"""Finite-dimensional normed spaces and convex segment geometry.

Everything downstream (net construction, graph audits, polyline placement)
funnels through the primitives here: norm evaluation, volume-uniform ball
sampling, and distances from points and segments to segments and spheres.

Proof obligation for the search routines: t -> ||a + t*(b - a) - p|| is a
norm composed with an affine map, hence convex on [0, 1], and the
two-parameter segment-segment objective is jointly convex for the same
reason.  Ternary search on a convex function brackets the true minimum, so
the minimizers below are exact up to the parameter tolerance; they are not
unimodality heuristics.  Randomized brute-force cross-checks live in the
test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import SamplingError, ValidationError

# Parameter tolerance for the convex searches; distances derived from them
# are then reliable to roughly 1e-8, which leaves headroom below the
# smallest constants used anywhere (strict-mode gamma ~ 1e-11 only enters
# comparisons, never divisions).
PARAM_TOL = 1e-9
_TERNARY_ITERS = 52  # (2/3)**52 < 1e-9


def as_vector(coords, dim: Optional[int] = None) -> np.ndarray:
    """Coerce to a finite float64 vector, optionally checking the dimension."""
    v = np.asarray(coords, dtype=np.float64)
    if v.ndim != 1:
        raise ValidationError(f"expected a 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValidationError("vector entries must be finite")
    if dim is not None and v.shape[0] != dim:
        raise ValidationError(f"dimension mismatch: vector has {v.shape[0]}, space has {dim}")
    return v


@dataclass(frozen=True)
class NormedSpace:
    """A finite-dimensional normed space with certified comparison factors.

    kind is one of "lp", "l1sum", "custom".  The factors carried alongside
    the norm are upper/lower bounds used for certified screening:

      box_factor   unit ball sits inside the sup-norm box of this half-width
                   (||x||_inf <= box_factor * ||x||)
      linf_factor  ||x|| <= linf_factor * ||x||_inf
      l2_lower     ||x|| >= l2_lower * ||x||_2   (0.0 when unknown)
      l2_upper     ||x|| <= l2_upper * ||x||_2   (inf when unknown)
    """

    kind: str
    dim: int
    p: float = 2.0
    parts: tuple = ()
    norm_fn: Optional[Callable] = field(default=None, compare=False)
    vectorized: bool = True
    box_factor: float = 1.0
    linf_factor: float = 1.0
    l2_lower: float = 1.0
    l2_upper: float = 1.0

    def norm(self, v) -> float:
        return float(norms(self, as_vector(v, self.dim)[None, :])[0])


def lp_space(p, dim: int) -> NormedSpace:
    """The space R^dim with the l_p norm, p in [1, inf]."""
    p = float(p)
    if dim < 1:
        raise ValidationError("dimension must be >= 1")
    if not (p >= 1.0):
        raise ValidationError("p must be >= 1")
    if math.isinf(p):
        # ||x||_inf <= ||x||_2 <= sqrt(n) ||x||_inf
        return NormedSpace("lp", dim, p=math.inf, linf_factor=1.0,
                           l2_lower=1.0 / math.sqrt(dim), l2_upper=1.0)
    linf = dim ** (1.0 / p)
    if p <= 2.0:
        l2_lo, l2_up = 1.0, dim ** (1.0 / p - 0.5)
    else:
        l2_lo, l2_up = dim ** (1.0 / p - 0.5), 1.0
    return NormedSpace("lp", dim, p=p, linf_factor=linf, l2_lower=l2_lo, l2_upper=l2_up)


def direct_sum_l1(a: NormedSpace, b: NormedSpace) -> NormedSpace:
    """The l1 direct sum: ||(x, y)|| = ||x||_a + ||y||_b."""
    return NormedSpace(
        "l1sum", a.dim + b.dim, parts=(a, b),
        box_factor=max(a.box_factor, b.box_factor),
        linf_factor=a.linf_factor + b.linf_factor,
        l2_lower=min(a.l2_lower, b.l2_lower),
        l2_upper=math.hypot(a.l2_upper, b.l2_upper),
    )


def custom_space(dim: int, norm_fn: Callable, box_factor: float,
                 vectorized: bool = False) -> NormedSpace:
    """Wrap a user norm evaluator.

    box_factor must be supplied: rejection sampling needs a certified
    enclosing box, and deriving one for an arbitrary norm is a separate hard
    problem.  The linf factor is certified from the basis vectors via the
    triangle inequality; the l2 comparison factors are left unknown, so the
    fast screening paths are skipped for custom norms.
    """
    if box_factor <= 0:
        raise ValidationError("box_factor must be positive")
    space = NormedSpace("custom", dim, norm_fn=norm_fn, vectorized=vectorized,
                        box_factor=float(box_factor), linf_factor=1.0,
                        l2_lower=0.0, l2_upper=math.inf)
    basis_norms = norms(space, np.eye(dim))
    if np.any(basis_norms <= 0):
        raise ValidationError("norm of a basis vector must be positive")
    return NormedSpace("custom", dim, norm_fn=norm_fn, vectorized=vectorized,
                       box_factor=float(box_factor),
                       linf_factor=float(np.sum(basis_norms)),
                       l2_lower=0.0, l2_upper=math.inf)


def norms(space: NormedSpace, pts: np.ndarray) -> np.ndarray:
    """Norms of a batch of row vectors, shape (m, dim) -> (m,)."""
    pts = np.asarray(pts, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != space.dim:
        raise ValidationError(
            f"dimension mismatch: points have shape {pts.shape}, space has dim {space.dim}")
    if space.kind == "lp":
        if math.isinf(space.p):
            return np.max(np.abs(pts), axis=1)
        if space.p == 1.0:
            return np.sum(np.abs(pts), axis=1)
        if space.p == 2.0:
            return np.sqrt(np.einsum("ij,ij->i", pts, pts))
        return np.sum(np.abs(pts) ** space.p, axis=1) ** (1.0 / space.p)
    if space.kind == "l1sum":
        a, b = space.parts
        return norms(a, pts[:, : a.dim]) + norms(b, pts[:, a.dim:])
    if space.vectorized:
        return np.asarray(space.norm_fn(pts), dtype=np.float64)
    return np.array([float(space.norm_fn(row)) for row in pts], dtype=np.float64)


def norm(space: NormedSpace, v) -> float:
    """Norm of a single vector."""
    return space.norm(v)


@dataclass(frozen=True)
class Segment:
    """A line segment [a, b]; degenerate (a == b) only when flagged."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", np.asarray(self.a, dtype=np.float64))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=np.float64))

    def point(self, t: float) -> np.ndarray:
        return self.a + t * (self.b - self.a)


def _ternary_batch(f, lo: np.ndarray, hi: np.ndarray, iters: int = _TERNARY_ITERS):
    """Vectorized ternary search for a batch of convex scalar functions.

    f maps a parameter array (k,) to values (k,).  Valid for convex f even
    with flat stretches: when f(m1) <= f(m2) a minimizer lies in [lo, m2].
    """
    for _ in range(iters):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        left = f(m1) <= f(m2)
        hi = np.where(left, m2, hi)
        lo = np.where(left, lo, m1)
    mid = 0.5 * (lo + hi)
    return mid, f(mid)


def points_segment_distance(space: NormedSpace, pts: np.ndarray, a, b,
                            tol: float = PARAM_TOL):
    """min_t ||a + t(b-a) - p|| for each row p of pts.  Returns (dist, t)."""
    pts = np.asarray(pts, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    d = np.asarray(b, dtype=np.float64) - a

    def f(tvals):
        return norms(space, a + tvals[:, None] * d - pts)

    m = pts.shape[0]
    t, val = _ternary_batch(f, np.zeros(m), np.ones(m))
    return val, t


def point_segment_distance(space: NormedSpace, p, s: Segment,
                           tol: float = PARAM_TOL) -> float:
    """Distance from a point to a segment, exact up to tol in the parameter."""
    p = as_vector(p, space.dim)
    val, _ = points_segment_distance(space, p[None, :], s.a, s.b, tol)
    return float(val[0])


def segment_segment_distance(space: NormedSpace, s1: Segment, s2: Segment,
                             tol: float = PARAM_TOL) -> float:
    """min over (s, t) in [0,1]^2 of ||s1(s) - s2(t)||.

    The objective is jointly convex, so the partial minimum over t is convex
    in s and nested ternary search is exact up to tol.
    """
    a1 = np.asarray(s1.a, dtype=np.float64)
    d1 = np.asarray(s1.b, dtype=np.float64) - a1

    def g(svals):
        pts = a1 + svals[:, None] * d1
        val, _ = points_segment_distance(space, pts, s2.a, s2.b, tol)
        return val

    _, val = _ternary_batch(g, np.zeros(1), np.ones(1))
    return float(val[0])


def sphere_segment_intersections(space: NormedSpace, center, radius: float,
                                 s: Segment, tol: float = PARAM_TOL) -> list[float]:
    """Parameters t where ||s(t) - center|| = radius.

    t -> ||s(t) - center|| is convex, so the segment crosses the sphere at
    most twice: locate the minimum by ternary search, then bisect each
    monotone side for the level crossing.  A tangency returns one root.
    """
    if radius <= 0:
        raise ValidationError("radius must be positive")
    center = as_vector(center, space.dim)
    a = s.a

    def f(tvals):
        return norms(space, a + tvals[:, None] * (s.b - a) - center)

    def f1(t):
        return float(f(np.array([t]))[0])

    tmin, vmin = _ternary_batch(f, np.zeros(1), np.ones(1))
    tmin, vmin = float(tmin[0]), float(vmin[0])
    if vmin > radius:
        return []

    roots = []
    # Left side: f is nonincreasing on [0, tmin].
    v0 = f1(0.0)
    if v0 >= radius:
        lo, hi = 0.0, tmin  # f(lo) >= radius >= f(hi)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if f1(mid) >= radius:
                lo = mid
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    v1 = f1(1.0)
    if v1 >= radius:
        lo, hi = tmin, 1.0  # f(lo) <= radius <= f(hi)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if f1(mid) <= radius:
                lo = mid
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    if len(roots) == 2 and abs(roots[0] - roots[1]) < tol:
        return [0.5 * (roots[0] + roots[1])]
    return roots


def segment_ball_clip(space: NormedSpace, a, b, center, radius: float,
                      tol: float = PARAM_TOL):
    """The parameter interval of [a, b] inside the closed ball, or None.

    By convexity the inside portion is a single interval.
    """
    seg = Segment(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))
    roots = sphere_segment_intersections(space, center, radius, seg, tol)
    va = norms(space, (seg.a - np.asarray(center, dtype=np.float64))[None, :])[0]
    vb = norms(space, (seg.b - np.asarray(center, dtype=np.float64))[None, :])[0]
    inside_a, inside_b = va <= radius, vb <= radius
    if not roots:
        if inside_a and inside_b:
            return (0.0, 1.0)
        return None
    if len(roots) == 1:
        t = roots[0]
        if inside_a:
            return (0.0, t)
        if inside_b:
            return (t, 1.0)
        return (t, t)
    return (roots[0], roots[1])


def sample_ball_many(space: NormedSpace, center, radius: float, count: int,
                     rng: np.random.Generator, budget_per_point: int = 10_000,
                     return_stats: bool = False):
    """count points uniform (volume) in the ball, by rejection from the
    enclosing box of half-width radius * box_factor."""
    if radius <= 0:
        raise ValidationError("radius must be positive")
    center = as_vector(center, space.dim)
    half = radius * space.box_factor
    out = np.empty((count, space.dim))
    got = 0
    draws = 0
    accepted = 0
    limit = budget_per_point * count
    while got < count:
        chunk = max(128, 2 * (count - got))
        if draws + chunk > limit:
            chunk = limit - draws
            if chunk <= 0:
                raise SamplingError(
                    f"rejection budget exceeded after {draws} draws "
                    f"(box_factor {space.box_factor} may be loose)")
        cand = center + rng.uniform(-half, half, size=(chunk, space.dim))
        draws += chunk
        keep = cand[norms(space, cand - center) <= radius]
        accepted += keep.shape[0]
        take = min(count - got, keep.shape[0])
        out[got:got + take] = keep[:take]
        got += take
    if return_stats:
        return out, draws, accepted
    return out


def sample_ball(space: NormedSpace, center, radius: float,
                rng: np.random.Generator, budget: int = 10_000) -> np.ndarray:
    """One point uniform in the ball {x : ||x - center|| <= radius}."""
    return sample_ball_many(space, center, radius, 1, rng,
                            budget_per_point=budget)[0]


# --- serialization ---------------------------------------------------------

def space_to_json(space: NormedSpace) -> dict:
    if space.kind == "lp":
        return {"kind": "lp", "p": "inf" if math.isinf(space.p) else space.p,
                "dim": space.dim}
    if space.kind == "l1sum":
        return {"kind": "l1sum", "dim": space.dim,
                "parts": [space_to_json(p) for p in space.parts]}
    raise ValidationError("custom spaces do not serialize to JSON")


def space_from_json(obj: dict) -> NormedSpace:
    try:
        kind = obj["kind"]
        if kind == "lp":
            p = math.inf if obj["p"] == "inf" else float(obj["p"])
            return lp_space(p, int(obj["dim"]))
        if kind == "l1sum":
            a, b = (space_from_json(part) for part in obj["parts"])
            return direct_sum_l1(a, b)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed space JSON: missing/invalid field {exc}") from exc
    raise ValidationError(f"unknown space kind {kind!r}")


def parse_space(descriptor: str) -> NormedSpace:
    """Mini-grammar: lp:<p|inf>:<dim> and l1sum:<desc>+<desc>."""
    space, rest = _parse_space(descriptor)
    if rest:
        raise ValidationError(f"trailing characters in space descriptor: {rest!r}")
    return space


def _parse_space(s: str):
    if s.startswith("lp:"):
        body = s[3:]
        sep = body.find(":")
        if sep < 0:
            raise ValidationError(f"bad lp descriptor (want lp:<p|inf>:<dim>): {s!r}")
        p_str = body[:sep]
        rest = body[sep + 1:]
        digits = 0
        while digits < len(rest) and rest[digits].isdigit():
            digits += 1
        if digits == 0:
            raise ValidationError(f"bad lp dimension in descriptor: {s!r}")
        p = math.inf if p_str == "inf" else float(p_str)
        return lp_space(p, int(rest[:digits])), rest[digits:]
    if s.startswith("l1sum:"):
        left, rest = _parse_space(s[6:])
        if not rest.startswith("+"):
            raise ValidationError(f"l1sum descriptor needs '+' between parts: {s!r}")
        right, rest = _parse_space(rest[1:])
        return direct_sum_l1(left, right), rest
    raise ValidationError(f"unknown space descriptor: {s!r}")
