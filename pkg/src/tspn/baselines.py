"""Reference algorithms: minimum-perimeter axis box, exact small tours,
and a local-search heuristic used as a desk-scale quality bound."""

import math
import time

import numpy as np

from . import simplex
from .errors import Infeasible, TooManyPoints
from .geometry import Hyperplane, Tour, tour_feasible, tour_length
from .instances import Instance, make_record

HELD_KARP_MAX = 15


def min_box(planes, dim):
    """Axis-aligned box of minimum perimeter proxy intersecting every hyperplane.

    Variables (l, u); for each hyperplane the corner extremal along its normal
    must lie on the far side, its opposite on the near side, which is linear
    because the extremal corner is fixed by the normal's sign pattern.
    """
    d = dim
    n = 2 * d  # l_0..l_{d-1}, u_0..u_{d-1}
    c = np.zeros(n)
    c[:d] = -1.0
    c[d:] = 1.0
    rows, rhs = [], []
    for j in range(d):  # u_j - l_j >= 0
        row = np.zeros(n)
        row[j], row[d + j] = 1.0, -1.0
        rows.append(row)
        rhs.append(0.0)
    for h in planes:
        hi = np.zeros(n)
        lo = np.zeros(n)
        for j, nj in enumerate(h.normal):
            if nj >= 0:
                hi[d + j] += nj
                lo[j] += nj
            else:
                hi[j] += nj
                lo[d + j] += nj
        rows.append(-hi)  # <corner_max, n> >= offset
        rhs.append(-h.offset)
        rows.append(lo)  # <corner_min, n> <= offset
        rhs.append(h.offset)
    res = simplex.solve_lp_arrays(c, A_ub=np.array(rows), b_ub=np.array(rhs))
    if res.status != simplex.OPTIMAL:
        raise Infeasible(f"box LP ended {res.status}; this cannot happen for real hyperplanes")
    return res.x[:d].copy(), res.x[d:].copy()


def gray_cycle(d):
    """Binary-reflected Gray sequence: a Hamiltonian cycle on the d-cube."""
    return [i ^ (i >> 1) for i in range(2**d)]


def box_corner_tour(lo, hi, closed=True) -> Tour:
    d = lo.size
    corners = []
    for code in gray_cycle(d):
        corners.append(np.array([hi[j] if (code >> j) & 1 else lo[j] for j in range(d)]))
    return Tour(tuple(corners), closed=closed)


def min_box_tour(inst: Instance, path_mode=False):
    t0 = time.perf_counter()
    planes = inst.geometry()
    lo, hi = min_box(planes, inst.dimension)
    tour = box_corner_tour(lo, hi, closed=not path_mode)
    report = tour_feasible(tour, planes)
    wall = (time.perf_counter() - t0) * 1000
    tag = "min-box-path" if path_mode else "min-box"
    return make_record(tag, tour, report, {"box_lo": [float(v) for v in lo],
                                           "box_hi": [float(v) for v in hi]}, wall)


def held_karp(points, closed=True) -> Tour:
    """Exact shortest tour (or open path) by subset dynamic programming."""
    pts = [np.asarray(p, dtype=float) for p in points]
    n = len(pts)
    if n > HELD_KARP_MAX:
        raise TooManyPoints(f"{n} points exceed the exact-DP cap {HELD_KARP_MAX}")
    if n == 0:
        raise ValueError("no points")
    if n == 1:
        return Tour((pts[0],), closed=closed)
    dist = [[float(np.linalg.norm(pts[i] - pts[j])) for j in range(n)] for i in range(n)]

    best_cost = {}
    parent = {}
    if closed:
        for j in range(1, n):
            best_cost[(1 << 0) | (1 << j), j] = dist[0][j]
            parent[(1 << 0) | (1 << j), j] = 0
    else:
        for j in range(n):
            best_cost[(1 << j), j] = 0.0
            parent[(1 << j), j] = -1
    full = (1 << n) - 1
    for mask in range(1, full + 1):
        for j in range(n):
            if not (mask >> j) & 1 or (mask, j) not in best_cost:
                continue
            base_cost = best_cost[mask, j]
            for k in range(n):
                if (mask >> k) & 1:
                    continue
                nm = mask | (1 << k)
                cand = base_cost + dist[j][k]
                if cand < best_cost.get((nm, k), math.inf):
                    best_cost[nm, k] = cand
                    parent[nm, k] = j
    if closed:
        end, _ = min(((j, best_cost[full, j] + dist[j][0]) for j in range(1, n)), key=lambda t: t[1])
    else:
        end, _ = min(((j, best_cost[full, j]) for j in range(n)), key=lambda t: t[1])
    route = []
    mask, j = full, end
    while True:
        route.append(j)
        if closed and j == 0 and mask == 1:
            break
        p = parent[mask, j]
        if p < 0:
            break
        mask ^= 1 << j
        j = p
    route.reverse()
    return Tour(tuple(pts[i] for i in route), closed=closed)


def _heron_point(h: Hyperplane, prev, nxt):
    """Point on the hyperplane minimizing |prev-p| + |p-nxt| (reflection trick)."""
    a = h.signed_distance(prev)
    b = h.signed_distance(nxt)
    if abs(a) < 1e-15 and abs(b) < 1e-15:
        return (prev + nxt) / 2
    if a * b <= 0:
        t = a / (a - b) if a != b else 0.0
        return prev + t * (nxt - prev)
    mirrored = nxt - 2 * b * h.normal
    am = a
    bm = h.signed_distance(mirrored)
    t = am / (am - bm) if am != bm else 0.0
    return prev + t * (mirrored - prev)


def _assign_owners(planes, pts):
    """Greedy matching: every hyperplane gets its nearest still-free waypoint."""
    cand = sorted(
        (abs(h.signed_distance(p)), i, w)
        for i, h in enumerate(planes)
        for w, p in enumerate(pts)
    )
    owner = {}
    used = set()
    for _, i, w in cand:
        if i in owner or w in used:
            continue
        owner[i] = w
        used.add(w)
        if len(owner) == len(planes):
            break
    return owner


def _descend(planes, pts, owner, closed, sweeps=40):
    m = len(pts)
    owned_by = {w: i for i, w in owner.items()}
    prev_len = math.inf
    for _ in range(sweeps):
        for w in range(m):
            if not closed and w == 0:
                neighbors = [pts[1]] if m > 1 else [pts[0]]
            elif not closed and w == m - 1:
                neighbors = [pts[m - 2]] if m > 1 else [pts[0]]
            else:
                neighbors = [pts[(w - 1) % m], pts[(w + 1) % m]]
            if w in owned_by:
                h = planes[owned_by[w]]
                if len(neighbors) == 2:
                    pts[w] = _heron_point(h, neighbors[0], neighbors[1])
                else:
                    q = neighbors[0]
                    pts[w] = q - h.signed_distance(q) * h.normal
            else:
                pts[w] = sum(neighbors) / len(neighbors)
        cur = tour_length(Tour(tuple(pts), closed=closed))
        if prev_len - cur < 1e-12:
            break
        prev_len = cur
    return pts


def local_search_oracle(inst: Instance, restarts=8, seed=0, path_mode=False):
    """Heuristic tour via alternating nearest-assignment and coordinate descent.

    Feasible by construction (each hyperplane owns a projected waypoint); the
    result is an upper bound on the optimum, never ground truth.
    """
    t0 = time.perf_counter()
    planes = inst.geometry()
    d = inst.dimension
    lo, hi = min_box(planes, d)
    m = max(2 * inst.n, 2)
    rng = np.random.default_rng(seed)
    closed = not path_mode
    best = None
    for r in range(max(restarts, 2)):
        if r == 0:  # box diagonal, first half at lo, second at hi
            pts = [lo.copy() for _ in range(m // 2)] + [hi.copy() for _ in range(m - m // 2)]
        elif r == 1:  # the other diagonal
            a, b = lo.copy(), hi.copy()
            a[0], b[0] = hi[0], lo[0]
            pts = [a.copy() for _ in range(m // 2)] + [b.copy() for _ in range(m - m // 2)]
        else:
            pts = [rng.uniform(lo - 0.5, hi + 0.5) for _ in range(m)]
        for _ in range(6):
            owner = _assign_owners(planes, pts)
            for i, w in owner.items():
                h = planes[i]
                pts[w] = pts[w] - h.signed_distance(pts[w]) * h.normal
            pts = _descend(planes, pts, owner, closed)
        owner = _assign_owners(planes, pts)
        for i, w in owner.items():
            h = planes[i]
            pts[w] = pts[w] - h.signed_distance(pts[w]) * h.normal
        tour = Tour(tuple(np.asarray(p) for p in pts), closed=closed)
        length = tour_length(tour)
        if best is None or length < best[0]:
            best = (length, tour)
    tour = best[1]
    report = tour_feasible(tour, planes)
    wall = (time.perf_counter() - t0) * 1000
    tag = "local-search-path" if path_mode else "local-search"
    return make_record(tag, tour, report, {"restarts": max(restarts, 2)}, wall)
