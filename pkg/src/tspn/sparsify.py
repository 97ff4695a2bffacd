"""Structural pipeline: ellipsoid normalization, ray-based vertex selection,
sparsification and grid snapping.

The pipeline certifies, for any full-dimensional polytope, a constant-size
vertex subset whose (1+eps)-expansion about a well-chosen center contains the
original body, and then snaps the result onto a rectilinear grid so that all
facets become parallel to base-set directions. These results justify the
search space of the LP enumeration; the solver itself never calls them.
"""

import itertools
import math
from dataclasses import dataclass

import cvxpy as cp
import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import simplex
from .base_sets import _ceil_snapped, k_eps_d
from .errors import ContainmentViolation, DegenerateBody
from .geometry import TOL, HalfSpace, Hyperplane, PolytopeH, PolytopeV, Tour, vertex_enumerate


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """{center + shape @ u : |u| <= 1} with symmetric positive-definite shape."""

    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        B = self.shape
        if not np.allclose(B, B.T, atol=1e-7):
            raise DegenerateBody("ellipsoid shape matrix is not symmetric")
        eigs = np.linalg.eigvalsh((B + B.T) / 2)
        if eigs.min() <= 1e-9 * max(1.0, eigs.max()):
            raise DegenerateBody("ellipsoid is rank deficient")


@dataclass(frozen=True, eq=False)
class AffineMap:
    """y = M x + t."""

    M: np.ndarray
    t: np.ndarray

    def apply(self, x):
        return self.M @ np.asarray(x, dtype=float) + self.t

    def apply_all(self, xs):
        return np.asarray(xs, dtype=float) @ self.M.T + self.t

    def inverse(self):
        Minv = np.linalg.inv(self.M)
        return AffineMap(Minv, -Minv @ self.t)


def halfspace_from_inward(inward):
    h = Hyperplane.from_coefficients(inward, 0.0)
    side = +1 if float(h.normal @ inward) > 0 else -1
    return HalfSpace(h, side)


def hull_to_hrep(points):
    """H-representation of conv(points) via qhull facet equations."""
    try:
        hull = ConvexHull(points)
    except QhullError as exc:
        raise DegenerateBody(f"input is not full-dimensional: {exc}") from exc
    A_out = hull.equations[:, :-1]
    b_out = hull.equations[:, -1]  # a.x + b <= 0 inside
    return hull, A_out, b_out


def polytope_h_from_vertices(points) -> PolytopeH:
    _, A_out, b_out = hull_to_hrep(points)
    halfspaces = tuple(halfspace_from_inward(-a) for a in A_out)
    return PolytopeH(halfspaces, b_out.copy())


def max_inscribed_ellipsoid(p: PolytopeH, solver="CLARABEL") -> Ellipsoid:
    """Maximum-volume inscribed ellipsoid of a bounded full-dimensional body.

    Solves the standard log-det formulation max log det B subject to
    |B a_i| + a_i . c <= b_i over the outward facet inequalities.
    """
    A_in, rho = p.inequalities()
    A = -A_in
    b = -rho
    d = A.shape[1]
    B = cp.Variable((d, d), PSD=True)
    center = cp.Variable(d)
    cons = [cp.norm(B @ A[i], 2) + A[i] @ center <= b[i] for i in range(A.shape[0])]
    prob = cp.Problem(cp.Maximize(cp.log_det(B)), cons)
    try:
        prob.solve(solver=solver)
    except cp.error.SolverError:
        prob.solve(solver="SCS")
    if prob.status not in ("optimal", "optimal_inaccurate") or B.value is None:
        raise DegenerateBody(f"inscribed-ellipsoid solve ended with status {prob.status}")
    shape = np.asarray((B.value + B.value.T) / 2)
    return Ellipsoid(np.asarray(center.value, dtype=float), shape)


def normalize_polytope(p: PolytopeH, containment_tol=1e-4):
    """Affine map sending the inscribed ellipsoid to the unit ball at the origin.

    Returns (map, image polytope). Verifies the image sits inside the radius-d
    ball, which the max-ellipsoid guarantees up to solver accuracy.
    """
    ell = max_inscribed_ellipsoid(p)
    Binv = np.linalg.inv(ell.shape)
    fmap = AffineMap(Binv, -Binv @ ell.center)
    A_in, rho = p.inequalities()
    halfspaces, shifts = [], []
    for m, r in zip(A_in, rho):
        v = ell.shape @ m
        nv = np.linalg.norm(v)
        if nv <= TOL:
            raise DegenerateBody("facet normal collapses under the ellipsoid map")
        halfspaces.append(halfspace_from_inward(v / nv))
        shifts.append((r - float(m @ ell.center)) / nv)
    p_norm = PolytopeH(tuple(halfspaces), np.array(shifts))
    d = p.dim
    radii = np.linalg.norm(vertex_enumerate(p_norm).as_array(), axis=1)
    if radii.max() > d * (1 + containment_tol):
        raise ContainmentViolation(
            f"normalized vertex at radius {radii.max():.6f} > {d} (solver inaccuracy)")
    return fmap, p_norm


@dataclass(frozen=True, eq=False)
class RaySet:
    theta: float
    angles: tuple
    directions: np.ndarray  # (count, d) unit vectors

    @property
    def count(self):
        return self.directions.shape[0]


def _ray_direction(angles):
    out = []
    s = 1.0
    for a in angles:
        out.append(s * math.cos(a))
        s *= math.sin(a)
    out.append(s)
    return np.array(out)


def ray_set(eps: float, d: int) -> RaySet:
    """Angle grid {i*theta} with 2*pi an exact multiple of theta, theta below
    arctan(eps/sqrt(d^2-1))/sqrt(d); rays are the (d-1)-fold angle product."""
    bound = math.atan(eps / math.sqrt(d * d - 1)) / math.sqrt(d)
    m = _ceil_snapped(2 * math.pi / bound)
    theta = 2 * math.pi / m
    angles = tuple(i * theta for i in range(m))
    dirs = np.array([_ray_direction(tup) for tup in itertools.product(angles, repeat=d - 1)])
    return RaySet(theta, angles, dirs)


def in_hull_lp(point, vertices, tol=1e-7) -> bool:
    """Convex-combination feasibility LP: point in conv(vertices)?"""
    V = np.asarray(vertices, dtype=float)
    p = np.asarray(point, dtype=float)
    n, d = V.shape
    A_eq = np.vstack([V.T, np.ones((1, n))])
    b_eq = np.concatenate([p, [1.0]])
    res = simplex.solve_lp_arrays(np.zeros(n), A_ub=-np.eye(n), b_ub=np.zeros(n),
                                  A_eq=A_eq, b_eq=b_eq)
    return res.status == simplex.OPTIMAL


@dataclass(frozen=True, eq=False)
class SparsifyReport:
    center: np.ndarray
    selected: np.ndarray  # subset of original vertices, one per row
    selected_indices: tuple
    expanded_hull: PolytopeV
    containment_margin: float
    n_surface: int
    n_selected: int
    ray_count: int


def _ray_surface_hits(points, directions):
    """For each ray from the origin: (first-hit parameter, facet index).

    Uses the facet inequalities of conv(points); the origin must be interior.
    """
    hull, A_out, b_out = hull_to_hrep(points)
    if b_out.max() > -1e-12:
        raise DegenerateBody("origin is not strictly interior to the hull")
    denom = directions @ A_out.T  # (R, F)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(denom > 1e-12, -b_out[None, :] / denom, np.inf)
    facet = np.argmin(t, axis=1)
    tstar = t[np.arange(t.shape[0]), facet]
    if not np.all(np.isfinite(tstar)):
        raise DegenerateBody("a ray escaped the hull; input unbounded?")
    return hull, tstar, facet


def _hull_margin(hull_points, test_points):
    """Smallest facet slack of the test points inside conv(hull_points)."""
    _, A_out, b_out = hull_to_hrep(hull_points)
    slack = -(np.asarray(test_points) @ A_out.T + b_out[None, :])
    return float(slack.min())


def select_sparse_vertices(p_norm: PolytopeV, eps: float, tol=TOL) -> SparsifyReport:
    """Ray-based vertex selection on a normalized polytope (unit ball inside).

    Intersects every ray with the surface, expands the hits by (1+eps), and
    replaces each hit by the at most d hull vertices carrying its facet.
    Containment of the original body is then certified vertex by vertex.
    """
    pts = p_norm.as_array()
    d = pts.shape[1]
    rays = ray_set(eps, d)
    hull, tstar, facet = _ray_surface_hits(pts, rays.directions)
    selected_idx = sorted({int(i) for f in facet for i in hull.simplices[f]})
    surface = rays.directions * tstar[:, None]
    n_surface = len({tuple(np.round(s, 9)) for s in surface})
    selected = pts[selected_idx]
    expanded = (1 + eps) * selected
    margin = _hull_margin(expanded, pts)
    if margin < -tol:
        raise ContainmentViolation(f"expansion hull misses the body by {-margin:.3e}")
    for v in pts:
        if not in_hull_lp(v, expanded):
            raise ContainmentViolation("hull-membership LP rejected an original vertex")
    return SparsifyReport(np.zeros(d), selected, tuple(selected_idx),
                          PolytopeV(tuple(expanded)), margin,
                          n_surface, len(selected_idx), rays.count)


def sparsify_polytope(p: PolytopeV, eps: float, tol=TOL) -> SparsifyReport:
    """Normalization + ray selection composed back into original coordinates."""
    pts = p.as_array()
    ph = polytope_h_from_vertices(pts)
    fmap, _ = normalize_polytope(ph)
    norm_pts = fmap.apply_all(pts)
    inner = select_sparse_vertices(PolytopeV(tuple(norm_pts)), eps, tol)
    center = fmap.inverse().t  # F^{-1}(0)
    selected = pts[list(inner.selected_indices)]
    expanded = center + (1 + eps) * (selected - center)
    margin = _hull_margin(expanded, pts)
    if margin < -tol * max(1.0, float(np.abs(pts).max())):
        raise ContainmentViolation(f"expansion hull misses the body by {-margin:.3e}")
    for v in pts:
        if not in_hull_lp(v, expanded):
            raise ContainmentViolation("hull-membership LP rejected an original vertex")
    return SparsifyReport(center, selected, inner.selected_indices,
                          PolytopeV(tuple(expanded)), margin,
                          inner.n_surface, inner.n_selected, inner.ray_count)


@dataclass(frozen=True, eq=False)
class SnapReport:
    polytope: PolytopeV
    granularity: float
    anchor: np.ndarray
    bounding_edge: float
    cells: tuple  # per input vertex: (2^d, d) array of its cell's corners


def snap_report(p_prime: PolytopeV, eps_prime: float, k_value=None) -> SnapReport:
    """Replace each vertex by its grid cell's 2^d corners and take the hull.

    The grid granularity follows the bounding-cube edge D and the constant
    k bound on the vertex count at accuracy (1+eps')^2 - 1; the grid anchor is
    the lexicographically smallest corner of the bounding cube.
    """
    pts = p_prime.as_array()
    d = pts.shape[1]
    mins = pts.min(axis=0)
    edge = float((pts.max(axis=0) - mins).max())
    if edge <= 0:
        raise DegenerateBody("polytope collapses to a point; nothing to snap")
    if k_value is None:
        k_value = k_eps_d((1 + eps_prime) ** 2 - 1, d)
    g = edge * eps_prime / (k_value * math.sqrt(d) * (2**d + 1))
    bits = np.array(list(itertools.product((0, 1), repeat=d)), dtype=float)
    cells = []
    corners = []
    for v in pts:
        idx = np.floor((v - mins) / g)
        cell = mins + g * (idx[None, :] + bits)
        cells.append(cell)
        corners.append(cell)
    allc = np.vstack(corners)
    hull = ConvexHull(allc)
    snapped = PolytopeV(tuple(allc[i] for i in hull.vertices))
    margin = _hull_margin(allc, pts)
    if margin < -TOL * max(1.0, float(np.abs(pts).max())):
        raise ContainmentViolation("snapped hull does not contain the input polytope")
    # every facet must run through at least d of the snapped grid points
    A_out = hull.equations[:, :-1]
    b_out = hull.equations[:, -1]
    onface = np.abs(allc @ A_out.T + b_out[None, :]) <= 1e-7 * max(1.0, edge)
    if int(onface.sum(axis=0).min()) < d:
        raise ContainmentViolation("a snapped facet passes through fewer than d grid points")
    return SnapReport(snapped, g, mins.copy(), edge, tuple(cells))


def snap_to_grid(p_prime: PolytopeV, eps_prime: float, k_value=None) -> PolytopeV:
    return snap_report(p_prime, eps_prime, k_value).polytope


def loop_tour_through_cells(base_tour: Tour, cells) -> Tour:
    """Augment a tour with a loop through each waypoint's cell corners.

    This is the explicit construction bounding the snapped tour: each loop
    costs at most (2^d + 1) hops of a cell diagonal.
    """
    waypoints = []
    for v, cell in zip(base_tour.waypoints, cells):
        waypoints.append(v)
        waypoints.extend(np.asarray(c) for c in cell)
        waypoints.append(v)
    return Tour(tuple(waypoints), closed=base_tour.closed)
