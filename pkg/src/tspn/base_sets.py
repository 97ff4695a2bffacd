"""Base hyperplane families: fixed direction sets all candidate facets obey.

The full grid family is generated from d-tuples of points of a cartesian grid
over the unit hypercube and re-homed at the origin. Since that family
explodes combinatorially at practically relevant granularities, reduced
families (axis + diagonal normals, or a custom normals file) are first-class
citizens for desk-scale runs; any granularity grid is equally valid for tests
because only the direction classes matter.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BaseSetTooLarge, TrivialBaseSet, UnboundedPolytope
from .geometry import HalfSpace, Hyperplane, PolytopeH


def _ceil_snapped(x, snap=1e-9):
    """Ceiling that forgives float noise just below an integer."""
    r = round(x)
    if abs(x - r) < snap:
        return int(r)
    return int(math.ceil(x))


def k_eps_d(eps: float, d: int) -> float:
    """(ceil(2*pi / arctan(eps / sqrt(d^2-1))) * sqrt(d)) ** (d-1)."""
    if eps <= 0 or d < 2:
        raise ValueError("need eps > 0 and d >= 2")
    m = _ceil_snapped(2 * math.pi / math.atan(eps / math.sqrt(d * d - 1)))
    return (m * math.sqrt(d)) ** (d - 1)


def grid_granularity(eps: float, d: int) -> float:
    """Grid cell side length: eps / (k_eps_d * sqrt(d) * (2^d + 1))."""
    return eps / (k_eps_d(eps, d) * math.sqrt(d) * (2**d + 1))


def hyperplane_from_tuple(points):
    """The unique hyperplane through d points, or None if they are affinely dependent."""
    pts = np.asarray(points, dtype=float)
    d = pts.shape[1]
    if pts.shape[0] != d:
        raise ValueError(f"need exactly {d} points in dimension {d}")
    diffs = pts[1:] - pts[0]
    if d == 1:
        return None
    # Unique hyperplane iff the difference vectors have rank d-1.
    # The normal spans the null space of the difference matrix.
    _, s, vt = np.linalg.svd(diffs)
    rank = int(np.sum(s > 1e-10 * max(1.0, s[0] if s.size else 1.0)))
    if rank != d - 1:
        return None
    normal = vt[-1]
    return Hyperplane.from_coefficients(normal, float(normal @ pts[0]))


@dataclass(frozen=True, eq=False)
class BaseSet:
    """Direction family: hyperplanes through the origin plus their signed half-spaces.

    signed[2k] and signed[2k+1] are the two half-spaces of hyperplanes[k].
    """

    hyperplanes: tuple
    signed: tuple
    provenance: str

    @property
    def dim(self):
        return self.hyperplanes[0].dim

    def normals(self):
        return np.array([h.normal for h in self.hyperplanes])

    def signed_normals(self):
        return np.array([hs.inward_normal for hs in self.signed])

    def find_signed(self, inward, tol=1e-7):
        """Index of the signed half-space whose inward normal matches."""
        v = np.asarray(inward, dtype=float)
        v = v / np.linalg.norm(v)
        for i, hs in enumerate(self.signed):
            if np.allclose(hs.inward_normal, v, atol=tol):
                return i
        raise KeyError(f"no signed half-space with inward normal {inward}")

    def unit_slab_polytope(self):
        """Every half-space shifted to -1; bounded iff the family is non-trivial."""
        shifts = -np.ones(len(self.signed))
        return PolytopeH(self.signed, shifts)


def _assemble(hyperplanes, provenance):
    seen = {}
    for h in hyperplanes:
        seen.setdefault(h.key(), h)
    planes = tuple(sorted(seen.values(), key=lambda h: h.key()))
    if not planes:
        raise TrivialBaseSet("no hyperplanes in base set")
    signed = []
    for h in planes:
        signed.append(HalfSpace(h, +1))
        signed.append(HalfSpace(h, -1))
    base = BaseSet(planes, tuple(signed), provenance)
    try:
        base.unit_slab_polytope()
    except UnboundedPolytope:
        raise TrivialBaseSet("base normals do not span the space; para(H) has no bounded polytope")
    return base


def _axis_hyperplanes(d):
    """Normals with entries in {-1, 0, 1}, deduplicated up to sign and scale."""
    out = []
    for combo in itertools.product((-1, 0, 1), repeat=d):
        if all(c == 0 for c in combo):
            continue
        lead = next(c for c in combo if c != 0)
        if lead < 0:
            continue  # sign representative
        out.append(Hyperplane.from_coefficients(np.array(combo, dtype=float), 0.0))
    return out


def _grid_points(granularity):
    steps = int(math.floor(1.0 / granularity + 1e-9))
    return [i * granularity for i in range(steps + 1)]


def _full_grid_hyperplanes(d, granularity, tuple_cap):
    axis_pts = _grid_points(granularity)
    pts = list(itertools.product(axis_pts, repeat=d))
    count = math.comb(len(pts), d)
    if count > tuple_cap:
        raise BaseSetTooLarge(
            f"{count} grid {d}-tuples exceed the cap {tuple_cap}; "
            "use a coarser granularity or a reduced mode"
        )
    out = []
    for tup in itertools.combinations(pts, d):
        h = hyperplane_from_tuple(np.array(tup))
        if h is None:
            continue
        out.append(Hyperplane.from_coefficients(h.normal, 0.0))  # re-home at origin
    return out


def _custom_hyperplanes(path, d):
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [float(p) for p in line.split()]
            if len(parts) != d:
                raise ValueError(f"{path}:{lineno}: expected {d} reals")
            out.append(Hyperplane.from_coefficients(parts, 0.0))
    return out


def build_base_set(mode, eps, d, granularity=None, tuple_cap=2_000_000) -> BaseSet:
    """Construct a base set: 'full' (grid d-tuples), 'axis', or a normals file path."""
    if mode == "axis":
        return _assemble(_axis_hyperplanes(d), "axis")
    if mode == "full":
        g = grid_granularity(eps, d) if granularity is None else granularity
        return _assemble(_full_grid_hyperplanes(d, g, tuple_cap), "full-grid")
    return _assemble(_custom_hyperplanes(mode, d), "custom")
