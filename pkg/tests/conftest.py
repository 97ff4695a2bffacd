import numpy as np
import pytest
from scipy.spatial import ConvexHull

from tspn.base_sets import build_base_set
from tspn.geometry import HalfSpace, Hyperplane, PolytopeH, PolytopeV


def random_polytope_v(rng, n_points, d, r_lo=1.0, r_hi=2.0):
    """Random full-dimensional V-polytope: hull of scaled unit directions."""
    raw = rng.normal(size=(n_points, d))
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)
    raw *= rng.uniform(r_lo, r_hi, (n_points, 1))
    hull = ConvexHull(raw)
    return PolytopeV(tuple(raw[hull.vertices]))


def random_polytope_h(rng, d, m):
    """Random bounded H-polytope containing the origin: m random facets plus
    a bounding box at radius 3."""
    halfspaces, shifts = [], []
    for _ in range(m):
        n = rng.normal(size=d)
        n /= np.linalg.norm(n)
        h = Hyperplane.from_coefficients(n, 0.0)
        side = +1 if float(h.normal @ n) > 0 else -1
        halfspaces.append(HalfSpace(h, side))
        shifts.append(-rng.uniform(0.4, 1.6))
    for j in range(d):
        e = np.zeros(d)
        e[j] = 1.0
        h = Hyperplane.from_coefficients(e, 0.0)
        halfspaces.append(HalfSpace(h, +1))
        shifts.append(-3.0)
        halfspaces.append(HalfSpace(h, -1))
        shifts.append(-3.0)
    return PolytopeH(tuple(halfspaces), np.array(shifts))


def random_shifts_in_para(base, rng, degenerate=0):
    """Shift vector realizing a bounded nonempty member of para(base)."""
    d = base.dim
    nh = len(base.hyperplanes)
    degen = set(rng.choice(nh, size=degenerate, replace=False).tolist()) if degenerate else set()
    z = rng.uniform(-1.0, 1.0, d)
    shifts = np.empty(2 * nh)
    for j, h in enumerate(base.hyperplanes):
        nz = float(h.normal @ z)
        lo = nz if j in degen else nz - rng.uniform(0.2, 1.2)
        hi = nz if j in degen else nz + rng.uniform(0.2, 1.2)
        shifts[2 * j] = lo
        shifts[2 * j + 1] = -hi
    return shifts


@pytest.fixture(scope="session")
def axis_base_2d():
    return build_base_set("axis", 1.0, 2)


@pytest.fixture(scope="session")
def axis_base_3d():
    return build_base_set("axis", 1.0, 3)
