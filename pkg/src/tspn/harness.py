"""Search orchestration: stream (configuration, order, guess) triples, solve
their LPs, recheck every candidate tour against the instance, and keep the
shortest. Also: baseline comparison tables and 2D SVG figures.

The search runs at the internal accuracy sqrt(1+eps)-1 so the end-to-end
guarantee against any polytope of the base family is (1+eps): the proxy
objective costs one such factor and the LP-vs-realized-tour comparison costs
the other. Candidate quality never relies on the proxy: tours are always
compared by true length.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import simplex
from .base_sets import build_base_set
from .baselines import HELD_KARP_MAX, held_karp, local_search_oracle, min_box, min_box_tour
from .enumeration import (Configuration, Counters, covering_guess_for_edges, delta,
                          enumerate_orders, sample_configurations)
from .errors import (DegenerateConfiguration, DimensionUnsupported, FeasibilityAssertionError,
                     NoCandidateFound, NumericalFailure)
from .geometry import PolytopeH, tour_feasible, tour_length
from .instances import Instance, RunConfig, make_record
from .lp import build_lp, extract_tour, solve_lp, tour_edges


def _distinct_in_order(points, tol):
    """First-occurrence representatives of coincident points, with positions."""
    reps, order = [], []
    for p in points:
        for k, q in enumerate(reps):
            if np.linalg.norm(p - q) <= tol:
                order.append(k)
                break
        else:
            order.append(len(reps))
            reps.append(p)
    return reps, order


def _held_karp_order(points, closed):
    if len(points) > HELD_KARP_MAX:
        return None
    tour = held_karp(points, closed=closed)
    order = []
    for w in tour.waypoints:
        order.append(min(range(len(points)), key=lambda i: np.linalg.norm(points[i] - w)))
    return tuple(order)


def _box_seed(base, planes, d, cfg):
    """Triples derived from the minimum axis box, which lies in para(base)
    whenever the base holds the coordinate normals. Solving them pins the
    relative-optimality guarantee against the box regardless of caps."""
    from .baselines import box_corner_tour

    for j in range(d):  # raises KeyError when the base lacks a coordinate normal
        e = np.zeros(d)
        e[j] = 1.0
        base.find_signed(e)
        base.find_signed(-e)

    lo, hi = min_box(planes, d)
    scale = 1.0 + float(np.abs(np.concatenate([lo, hi])).max())
    corner_tour = box_corner_tour(lo, hi)
    reps, induced = _distinct_in_order(list(corner_tour.waypoints), 1e-9 * scale)

    shifts = np.empty(len(base.signed))
    for s, hs in enumerate(base.signed):
        n = hs.inward_normal
        axis = np.flatnonzero(np.abs(np.abs(n) - 1.0) <= 1e-12)
        if axis.size == 1 and np.abs(n).sum() <= 1.0 + 1e-12:
            j = int(axis[0])
            shifts[s] = lo[j] if n[j] > 0 else -hi[j]
        else:
            shifts[s] = min(float(n @ c) for c in reps) - 1.0
    P = PolytopeH(base.signed, shifts)
    act_tol = 1e-7 * scale
    elements = [frozenset(P.active_indices(v, act_tol)) for v in reps]
    if any(len(e) < d for e in elements):
        raise DegenerateConfiguration("box corner with deficient active set")
    config = Configuration(tuple(elements))
    elem_of_rep = [next(i for i, e in enumerate(config.elements) if e == elements[k])
                   for k in range(len(reps))]
    verts = [None] * len(config)
    for k, i in enumerate(elem_of_rep):
        verts[i] = reps[k]

    orders = []
    gray_order = []
    seen = set()
    for k in induced:
        if k not in seen:
            seen.add(k)
            gray_order.append(elem_of_rep[k])
    orders.append(tuple(gray_order))
    hk = _held_karp_order(reps, closed=not cfg.path_mode)
    if hk is not None:
        orders.append(tuple(elem_of_rep[k] for k in hk))
    if len(config) <= 4:
        orders.extend(enumerate_orders(len(config)))
    return config, tuple(verts), orders


def _orders_for(real_verts, k, cfg, counters):
    orders = []
    if k <= 5:
        orders.extend(enumerate_orders(k, cap=cfg.order_cap, counters=counters))
    else:
        orders.append(tuple(range(k)))
        hk = _held_karp_order(list(real_verts), closed=not cfg.path_mode)
        if hk is not None:
            orders.append(hk)
    seen = set()
    out = []
    for o in orders:
        if o not in seen:
            seen.add(o)
            out.append(o)
        if len(out) >= cfg.order_cap:
            counters["orders_truncated"] = True
            break
    return out


def _guess_for(real_verts, order, dlt, path_mode):
    pairs = tour_edges(order, len(order), path_mode)
    edges = [real_verts[b] - real_verts[a] for a, b in pairs]
    return covering_guess_for_edges(edges, dlt)


def _process_triple(args):
    """Build, solve, recheck and (once) refine one triple. Returns candidate
    tours as (length, waypoint-key, waypoints, witnesses) plus counter ticks."""
    config, order, guess, base, planes, path_mode, dlt = args
    counters = Counters()
    candidates = []

    def attempt(g):
        try:
            model = build_lp(config, order, g, base, planes, path_mode)
        except DegenerateConfiguration:
            counters.tick("triples_degenerate")
            return None
        try:
            sol = solve_lp(model)
        except NumericalFailure:
            counters.tick("lps_numerical_failure")
            return None
        counters.tick("lps_solved")
        if sol.status != simplex.OPTIMAL:
            counters.tick(f"lps_{sol.status}")
            return None
        tour = extract_tour(sol)
        report = tour_feasible(tour, planes)
        if not report.feasible:
            raise FeasibilityAssertionError(
                f"LP candidate missed hyperplanes {report.unvisited}")
        candidates.append((tour_length(tour),
                           tuple(tuple(float(x) for x in p) for p in tour.waypoints),
                           tour, report))
        return sol

    sol = attempt(guess)
    if sol is not None and len(config) > 1:
        pairs = tour_edges(order, len(order), path_mode)
        edges = [sol.xs[b] - sol.xs[a] for a, b in pairs]
        refined = covering_guess_for_edges(edges, dlt)
        if refined != guess:
            counters.tick("refinements")
            attempt(refined)
    return candidates, counters


def run_ptas(inst: Instance, cfg: RunConfig):
    """Minimum true-length feasible tour over the streamed LP candidates."""
    t0 = time.perf_counter()
    d = inst.dimension
    planes = inst.geometry()
    eps_internal = math.sqrt(1 + cfg.epsilon) - 1
    dlt = delta(eps_internal, d)
    base = build_base_set(cfg.base_set_mode, cfg.epsilon, d)
    counters = Counters()

    triples = []
    try:
        config, verts, orders = _box_seed(base, planes, d, cfg)
        for order in orders:
            triples.append((config, order, _guess_for(verts, order, dlt, cfg.path_mode),
                            base, planes, cfg.path_mode, dlt))
        counters.tick("seed_triples", by=len(orders))
    except (KeyError, DegenerateConfiguration):
        counters["seed_skipped"] = True  # no coordinate normals or degenerate box

    reals = sample_configurations(base, cfg.samples, cfg.seed, counters)
    if len(reals) > cfg.config_cap:
        reals = reals[:cfg.config_cap]
        counters["configs_truncated"] = True
    for real in reals:
        for order in _orders_for(real.vertices, len(real.config), cfg, counters):
            triples.append((real.config, order,
                            _guess_for(real.vertices, order, dlt, cfg.path_mode),
                            base, planes, cfg.path_mode, dlt))
    counters.tick("triples_enumerated", by=len(triples))

    if cfg.jobs > 1 and len(triples) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            outputs = list(pool.map(_process_triple, triples, chunksize=4))
    else:
        outputs = [_process_triple(t) for t in triples]

    candidates = []
    for cands, ticks in outputs:
        candidates.extend(cands)
        for key, val in ticks.items():
            if isinstance(val, bool):
                counters[key] = counters.get(key, False) or val
            else:
                counters.tick(key, by=val)

    if not candidates:
        raise NoCandidateFound("all LP triples were degenerate or infeasible", counters)
    length, _, tour, report = min(candidates, key=lambda c: (c[0], c[1]))
    wall = (time.perf_counter() - t0) * 1000
    tag = "ptas-path" if cfg.path_mode else "ptas"
    return make_record(tag, tour, report, counters, wall)


def compare(inst: Instance, cfg: RunConfig):
    """Run the LP search and both baselines; aligned text plus a JSON-ready dict."""
    records = {
        "ptas": run_ptas(inst, cfg),
        "min-box": min_box_tour(inst, path_mode=cfg.path_mode),
        "local-search": local_search_oracle(inst, seed=cfg.seed, path_mode=cfg.path_mode),
    }
    best = min(r.length for r in records.values())
    rows = []
    for name, rec in records.items():
        ratio = rec.length / best if best > 0 else 1.0
        rows.append((name, rec.length, ratio, rec.feasibility.feasible, rec.wall_ms))
    header = f"{'algorithm':<14}{'length':>12}{'ratio':>9}{'feasible':>10}{'wall_ms':>10}"
    lines = [header]
    for name, length, ratio, feas, wall in rows:
        lines.append(f"{name:<14}{length:>12.6f}{ratio:>9.4f}{str(feas):>10}{wall:>10.1f}")
    table = "\n".join(lines)
    payload = {
        name: {"length": rec.length, "ratio": rec.length / best if best > 0 else 1.0,
               "feasible": rec.feasibility.feasible, "wall_ms": rec.wall_ms}
        for name, rec in records.items()
    }
    return records, table, payload


_PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e")


def _fmt(x):
    return f"{x:.6f}"


def _clip_line_to_box(h, lo, hi):
    """Segment of the line {<n,x> = c} inside the [lo, hi] rectangle, or None."""
    n, c = h.normal, h.offset
    pts = []
    for axis in (0, 1):
        other = 1 - axis
        for bound in (lo[axis], hi[axis]):
            if abs(n[other]) < 1e-12:
                continue
            val = (c - n[axis] * bound) / n[other]
            if lo[other] - 1e-9 <= val <= hi[other] + 1e-9:
                p = np.empty(2)
                p[axis], p[other] = bound, val
                pts.append(p)
    uniq = []
    for p in pts:
        if all(np.linalg.norm(p - q) > 1e-9 for q in uniq):
            uniq.append(p)
    if len(uniq) < 2:
        return None
    direction = np.array([-n[1], n[0]])
    uniq.sort(key=lambda p: float(p @ direction))
    return uniq[0], uniq[-1]


def emit_svg(inst: Instance, tours, path):
    """Deterministic SVG: instance lines gray, tours colored polylines."""
    if inst.dimension != 2:
        raise DimensionUnsupported("SVG output supports d=2 only")
    planes = inst.geometry()
    pts = [np.asarray(w) for t in tours for w in t.waypoints]
    for a, b in ((i, j) for i in range(len(planes)) for j in range(i + 1, len(planes))):
        ha, hb = planes[a], planes[b]
        M = np.array([ha.normal, hb.normal])
        if abs(np.linalg.det(M)) > 1e-9:
            x = np.linalg.solve(M, [ha.offset, hb.offset])
            if np.abs(x).max() < 1e6:
                pts.append(x)
    if not pts:
        pts = [np.array([-1.0, -1.0]), np.array([1.0, 1.0])]
    arr = np.array(pts)
    lo, hi = arr.min(axis=0), arr.max(axis=0)
    span = max(float((hi - lo).max()), 1e-6)
    pad = 0.1 * span
    lo, hi = lo - pad, hi + pad
    w, h = hi - lo

    def sx(p):
        return _fmt(p[0] - lo[0])

    def sy(p):
        return _fmt(hi[1] - p[1])  # flip y for screen coordinates

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_fmt(w)} {_fmt(h)}" '
        f'width="640" height="{_fmt(640 * h / w)}">',
        f'<rect x="0" y="0" width="{_fmt(w)}" height="{_fmt(h)}" fill="#ffffff"/>',
    ]
    stroke = 0.004 * span
    for hplane in planes:
        seg = _clip_line_to_box(hplane, lo, hi)
        if seg is None:
            continue
        a, b = seg
        out.append(f'<line x1="{sx(a)}" y1="{sy(a)}" x2="{sx(b)}" y2="{sy(b)}" '
                   f'stroke="#999999" stroke-width="{_fmt(stroke)}"/>')
    for k, tour in enumerate(tours):
        color = _PALETTE[k % len(_PALETTE)]
        coords = " ".join(f"{sx(p)},{sy(p)}" for p in tour.waypoints)
        tag = "polygon" if tour.closed and len(tour.waypoints) > 2 else "polyline"
        out.append(f'<{tag} points="{coords}" fill="none" stroke="{color}" '
                   f'stroke-width="{_fmt(1.5 * stroke)}"/>')
        for p in tour.waypoints:
            out.append(f'<circle cx="{sx(p)}" cy="{sy(p)}" r="{_fmt(1.8 * stroke)}" fill="{color}"/>')
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    with open(path, "w") as fh:
        fh.write(text)
    return text


def gen_instance(d, n, seed, coeff=5) -> Instance:
    """Random integer instance; rows deduplicated, zero normals rejected."""
    rng = np.random.default_rng(seed)
    rows = []
    seen = set()
    while len(rows) < n:
        row = tuple(int(v) for v in rng.integers(-coeff, coeff + 1, d + 1))
        if all(a == 0 for a in row[:-1]) or row in seen:
            continue
        seen.add(row)
        rows.append(row)
    return Instance(d, tuple(rows))
