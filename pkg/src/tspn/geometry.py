"""Vector, hyperplane and polytope primitives with explicit tolerances.

All predicates work on unit-normal hyperplanes so the absolute tolerance TOL
is meaningful regardless of the integer scale of the input instance.
"""

from dataclasses import dataclass

import numpy as np
from itertools import combinations

from . import simplex
from .errors import EmptyKeepSet, EmptyPolytope, UnboundedPolytope

TOL = 1e-9
DEDUP_TOL = 10 * TOL

DIM_MIN = 2
DIM_MAX = 4


def as_point(p):
    a = np.asarray(p, dtype=float)
    if a.ndim != 1 or not np.all(np.isfinite(a)):
        raise ValueError(f"not a finite point: {p!r}")
    return a


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """Affine hyperplane {x : <normal, x> = offset} with unit normal.

    Canonical form: the normal has unit length and its first nonzero
    coordinate is positive, so equal hyperplanes compare equal within TOL.
    """

    normal: np.ndarray
    offset: float

    @staticmethod
    def from_coefficients(coeffs, offset):
        n = as_point(coeffs)
        norm = np.linalg.norm(n)
        if norm <= TOL:
            raise ValueError("hyperplane normal must be nonzero")
        n = n / norm
        c = float(offset) / norm
        lead = np.flatnonzero(np.abs(n) > TOL)
        if lead.size and n[lead[0]] < 0:
            n, c = -n, -c
        n = n + 0.0  # normalize -0.0
        n.setflags(write=False)
        return Hyperplane(n, c)

    @property
    def dim(self):
        return self.normal.size

    def signed_distance(self, p):
        return float(np.dot(self.normal, as_point(p)) - self.offset)

    def contains(self, p, tol=TOL):
        return abs(self.signed_distance(p)) <= tol

    def foot_point(self):
        """The perpendicular foot from the origin (a canonical fixed point)."""
        return self.offset * self.normal

    def is_same(self, other, tol=TOL):
        return (
            np.allclose(self.normal, other.normal, atol=tol)
            and abs(self.offset - other.offset) <= tol
        )

    def key(self, decimals=7):
        return tuple(np.round(self.normal, decimals)) + (round(self.offset, decimals),)


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """One side of a hyperplane; inward_normal points into the half-space."""

    boundary: Hyperplane
    side: int  # +1: inward along boundary.normal, -1: opposite

    def __post_init__(self):
        if self.side not in (+1, -1):
            raise ValueError("side must be +1 or -1")

    @property
    def inward_normal(self):
        return self.side * self.boundary.normal

    @property
    def signed_offset(self):
        """p is inside iff <p, inward_normal> >= signed_offset."""
        return self.side * self.boundary.offset

    def contains(self, p, tol=TOL):
        return float(np.dot(self.inward_normal, as_point(p))) >= self.signed_offset - tol


@dataclass(frozen=True, eq=False)
class PolytopeH:
    """Intersection of translated half-spaces: {x : <n_i, x> >= rho_i}.

    halfspaces[i] supplies the inward unit normal n_i; shifts[i] is its
    translation rho_i along that normal. Construction verifies the
    intersection is nonempty and bounded (one LP per +-coordinate direction).
    """

    halfspaces: tuple
    shifts: np.ndarray

    def __post_init__(self):
        shifts = np.asarray(self.shifts, dtype=float)
        shifts.setflags(write=False)
        object.__setattr__(self, "shifts", shifts)
        if len(self.halfspaces) != shifts.size or not len(self.halfspaces):
            raise ValueError("halfspaces and shifts must align and be nonempty")
        A, b = self.inequalities()
        for j in range(self.dim):
            for sign in (+1.0, -1.0):
                c = np.zeros(self.dim)
                c[j] = sign  # maximize sign*x_j == minimize -sign*x_j
                res = simplex.solve_lp_arrays(-c, A_ub=-A, b_ub=-b)
                if res.status == simplex.UNBOUNDED:
                    raise UnboundedPolytope(f"unbounded along {sign:+g}*e_{j}")
                if res.status == simplex.INFEASIBLE:
                    raise EmptyPolytope("half-space intersection is empty")

    @property
    def dim(self):
        return self.halfspaces[0].boundary.dim

    def inequalities(self):
        """(A, b) with the polytope equal to {x : A x >= b}."""
        A = np.array([h.inward_normal for h in self.halfspaces])
        return A, self.shifts.copy()

    def contains(self, p, tol=TOL):
        A, b = self.inequalities()
        return bool(np.all(A @ as_point(p) >= b - tol))

    def active_indices(self, p, tol=DEDUP_TOL):
        A, b = self.inequalities()
        return tuple(np.flatnonzero(np.abs(A @ as_point(p) - b) <= tol))


def dedup_points(points, tol=DEDUP_TOL):
    """Cluster points within tol and keep cluster centroids."""
    clusters = []
    for p in points:
        for cluster in clusters:
            if np.linalg.norm(cluster[0] - p) <= tol:
                cluster.append(p)
                break
        else:
            clusters.append([p])
    out = [np.mean(cluster, axis=0) for cluster in clusters]
    return sorted(out, key=lambda q: tuple(q))


@dataclass(frozen=True, eq=False)
class PolytopeV:
    """Vertex representation; vertices are deduplicated at construction."""

    vertices: tuple

    @staticmethod
    def from_points(points, tol=DEDUP_TOL):
        pts = [as_point(p) for p in points]
        if not pts:
            raise EmptyPolytope("no vertices")
        return PolytopeV(tuple(dedup_points(pts, tol)))

    @property
    def dim(self):
        return self.vertices[0].size

    def as_array(self):
        return np.array(self.vertices)


def vertex_enumerate(p: PolytopeH, tol=TOL) -> PolytopeV:
    """All vertices of a bounded H-polytope by d-subset intersection.

    Every d-subset of bounding hyperplanes with a well-conditioned
    intersection point that satisfies the remaining half-spaces contributes a
    vertex; coincident solutions are merged.
    """
    A, b = p.inequalities()
    m, d = A.shape
    rows = np.array(list(combinations(range(m), d)))
    M = A[rows]  # (K, d, d) stacked subsystems
    dets = np.linalg.det(M)
    ok = np.abs(dets) > 1e-10
    points = []
    if ok.any():
        X = np.linalg.solve(M[ok], b[rows[ok]][..., None])[..., 0]
        slack = X @ A.T - b[None, :]
        feas = np.all(slack >= -tol * (1.0 + np.abs(b))[None, :], axis=1)
        points = list(X[feas])
    if not points:
        raise EmptyPolytope("no vertex found; polytope empty or degenerate input")
    return PolytopeV(tuple(dedup_points(points)))


def polytope_intersects_hyperplane(p: PolytopeV, h: Hyperplane, tol=TOL) -> bool:
    """True iff conv(vertices) meets the hyperplane (convexity: dot range test)."""
    dots = p.as_array() @ h.normal
    return dots.min() <= h.offset + tol and h.offset - tol <= dots.max()


@dataclass(frozen=True, eq=False)
class Tour:
    """Polyline through waypoints; the closing edge counts iff closed."""

    waypoints: tuple
    closed: bool = True

    @staticmethod
    def of(points, closed=True):
        pts = tuple(as_point(q) for q in points)
        if not pts:
            raise ValueError("a tour needs at least one waypoint")
        return Tour(pts, closed)

    @property
    def dim(self):
        return self.waypoints[0].size

    def segments(self):
        pts = self.waypoints
        if len(pts) == 1:
            yield pts[0], pts[0]
            return
        for a, b in zip(pts, pts[1:]):
            yield a, b
        if self.closed:
            yield pts[-1], pts[0]


def tour_length(t: Tour) -> float:
    return float(sum(np.linalg.norm(b - a) for a, b in t.segments()))


@dataclass(frozen=True, eq=False)
class FeasibilityReport:
    feasible: bool
    visited: tuple  # per-hyperplane booleans
    witnesses: tuple  # per-hyperplane witness point or None

    @property
    def unvisited(self):
        return tuple(i for i, v in enumerate(self.visited) if not v)


def _segment_hit(a, b, h: Hyperplane, tol):
    fa, fb = h.signed_distance(a), h.signed_distance(b)
    if abs(fa) <= tol:
        return a
    if abs(fb) <= tol:
        return b
    if fa * fb < 0:
        t = fa / (fa - fb)
        return a + t * (b - a)
    return None


def tour_feasible(t: Tour, inst, tol=TOL) -> FeasibilityReport:
    """Check that the polyline visits every hyperplane; report witnesses."""
    visited, witnesses = [], []
    for h in inst:
        w = None
        for a, b in t.segments():
            w = _segment_hit(a, b, h, tol)
            if w is not None:
                break
        visited.append(w is not None)
        witnesses.append(None if w is None else np.asarray(w))
    return FeasibilityReport(all(visited), tuple(visited), tuple(witnesses))


def scale_points(ps, center, factor):
    """Expansion {c + factor*(p - c)} applied pointwise."""
    if factor <= 0:
        raise ValueError("scaling factor must be positive")
    c = as_point(center)
    return [c + factor * (as_point(p) - c) for p in ps]


def shortcut_tour(t: Tour, keep) -> Tour:
    """Drop waypoints not in keep (by index), preserving cyclic order."""
    idx = sorted(set(keep))
    if not idx:
        raise EmptyKeepSet("keep set is empty")
    if idx[0] < 0 or idx[-1] >= len(t.waypoints):
        raise IndexError("keep indices out of range")
    return Tour(tuple(t.waypoints[i] for i in idx), t.closed)
