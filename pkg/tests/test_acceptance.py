"""Acceptance suite: one test per criterion, desk scale.

Each test prints a `[acceptance] criterion NN <name>: PASS` line (run pytest
with -s to see them) and enforces its stated tolerance and runtime budget.
"""

import math
import time

import numpy as np
import pytest

from tspn.base_sets import build_base_set
from tspn.baselines import held_karp, local_search_oracle, min_box_tour
from tspn.enumeration import (build_arc_graph, covering_guess_for_vector, delta,
                              realize_configuration, separated_pair)
from tspn.geometry import PolytopeV, Tour, tour_feasible, tour_length, vertex_enumerate
from tspn.harness import gen_instance, run_ptas
from tspn.instances import RunConfig, parse_instance
from tspn.lp import approx_length
from tspn.sparsify import (loop_tour_through_cells, normalize_polytope, polytope_h_from_vertices,
                           select_sparse_vertices, snap_report, sparsify_polytope)

from conftest import random_polytope_v, random_shifts_in_para

TAU = 1e-9


def _report(num, name, t0, budget_s):
    elapsed = time.perf_counter() - t0
    assert elapsed < budget_s, f"criterion {num} exceeded its {budget_s}s budget ({elapsed:.1f}s)"
    print(f"[acceptance] criterion {num:02d} {name}: PASS ({elapsed:.1f}s)")


def test_criterion_01_feasibility_soundness():
    """500 random instances: run_ptas re-checks every LP candidate internally
    (a failure raises FeasibilityAssertionError), and the returned tours and
    the box tours pass tour_feasible at tolerance TAU."""
    t0 = time.perf_counter()
    epsilons = (0.25, 0.5, 1.0)
    for i in range(500):
        d = 2 if i % 10 < 7 else 3
        n = 1 + i % 8
        inst = gen_instance(d, n, seed=i)
        cfg = RunConfig(epsilon=epsilons[i % 3], samples=12, config_cap=6,
                        order_cap=4, seed=i)
        rec = run_ptas(inst, cfg)
        planes = inst.geometry()
        assert tour_feasible(rec.tour, planes, tol=TAU).feasible, f"ptas infeasible at seed {i}"
        box = min_box_tour(inst)
        assert tour_feasible(box.tour, planes, tol=TAU).feasible, f"box infeasible at seed {i}"
    _report(1, "feasibility soundness", t0, 600)


def test_criterion_02_length_proxy_sandwich():
    """10^4 random vectors per (eps, d): proxy within [1/(1+eps), 1+eps] of the
    true norm under the best covering guess. Zero violations (1e-12 fp guard)."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    for eps in (0.25, 0.5, 1.0):
        for d in (2, 3):
            dlt = delta(eps, d)
            vs = rng.normal(size=(10_000, d))
            for v in vs:
                nv = float(np.linalg.norm(v))
                if nv < 1e-12:
                    continue
                ratio = approx_length(v, covering_guess_for_vector(v, dlt)) / nv
                assert 1 / (1 + eps) - 1e-12 <= ratio <= (1 + eps) + 1e-12, (eps, d, v)
    _report(2, "length proxy sandwich", t0, 60)


def test_criterion_03_separated_pair_correctness():
    """200 realized polytopes from the axis base, 50 clean directions each:
    the token walk must match the brute-force vertex scan exactly."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    bases = {2: build_base_set("axis", 1.0, 2), 3: build_base_set("axis", 1.0, 3)}
    for i in range(200):
        d = 2 if i < 100 else 3
        base = bases[d]
        real = realize_configuration(base, random_shifts_in_para(base, rng))
        graph = build_arc_graph(real.config, base)
        verts = np.array(real.vertices)
        checked = 0
        while checked < 50:
            n = rng.normal(size=d)
            n /= np.linalg.norm(n)
            dots = verts @ n
            srt = np.sort(dots)
            if len(srt) > 1 and (srt[-1] - srt[-2] < 1e-7 or srt[1] - srt[0] < 1e-7):
                continue  # ambiguous argmax: direction not a valid probe
            cp, cm = separated_pair(graph, n)
            assert cp == int(np.argmax(dots)), f"polytope {i}"
            assert cm == int(np.argmin(dots)), f"polytope {i}"
            checked += 1
    _report(3, "separated pair correctness", t0, 120)


def test_criterion_04_relative_optimality_vs_box():
    """200 fuzz instances with the axis base: the search result is within
    (1+eps) of the box corner tour, 1e-6 relative tolerance."""
    t0 = time.perf_counter()
    epsilons = (0.25, 0.5, 1.0)
    for i in range(200):
        d = 2 if i % 10 < 7 else 3
        eps = epsilons[i % 3]
        inst = gen_instance(d, 1 + i % 8, seed=10_000 + i)
        cfg = RunConfig(epsilon=eps, samples=12, config_cap=6, order_cap=4, seed=i)
        rec = run_ptas(inst, cfg)
        box = min_box_tour(inst)
        limit = (1 + eps) * box.length
        assert rec.length <= limit + 1e-6 * max(1.0, limit), \
            f"seed {10_000 + i}: {rec.length} > (1+{eps})*{box.length}"
    _report(4, "relative optimality vs box", t0, 1800)


def test_criterion_05_concrete_square_instance():
    """Lines x=0, x=1, y=0, y=1 at eps=0.25: result within 1.25 of the
    analytic diagonal tour 2*sqrt(2), cross-checked against local search."""
    t0 = time.perf_counter()
    inst = parse_instance("2 4\n1 0 0\n1 0 1\n0 1 0\n0 1 1")
    cfg = RunConfig(epsilon=0.25, samples=48, config_cap=16, order_cap=8, seed=0)
    rec = run_ptas(inst, cfg)
    reference = 2 * math.sqrt(2)
    local = local_search_oracle(inst, restarts=8, seed=0)
    assert local.length == pytest.approx(reference, abs=1e-6)
    assert rec.length <= 1.25 * reference + 1e-9
    _report(5, "concrete square instance", t0, 60)


def test_criterion_06_sparsification_containment():
    """200 random polytopes, eps in {0.5, 1}: the (1+eps)-expansion hull of the
    selected vertices contains the body (margin >= -TAU) and the selection
    count respects d * |A|^(d-1)."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(66)
    for i in range(200):
        d = 2 if i < 100 else 3
        eps = 0.5 if i % 2 == 0 else 1.0
        n_pts = int(rng.integers(20, 101)) if d == 2 else int(rng.integers(10, 41))
        poly = random_polytope_v(rng, n_pts, d)
        rep = sparsify_polytope(poly, eps)
        assert rep.containment_margin >= -TAU, f"case {i}"
        assert rep.n_selected <= d * rep.ray_count, f"case {i}"
    _report(6, "sparsification containment", t0, 600)


def test_criterion_07_scaled_tour_pipeline_bound():
    """100 random polytopes with <= 12 vertices: the snapped sparsified
    polytope admits a tour within (1+eps')^2 of the original exact tour.
    The explicit loop construction certifies the bound for every case; the
    exact DP re-checks it whenever the snapped hull has <= 15 vertices."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(77)
    exact_checked = 0
    for i in range(100):
        d = 2 if i < 70 else 3
        eps = 0.5 if i % 2 == 0 else 1.0
        eps_prime = math.sqrt(1 + eps) - 1
        n_pts = int(rng.integers(d + 2, 13))
        poly = random_polytope_v(rng, n_pts, d)
        if len(poly.vertices) > 12:
            poly = PolytopeV(poly.vertices[:12])
            poly = PolytopeV(tuple(poly.vertices))
        hk_original = tour_length(held_karp(list(poly.vertices)))

        rep = sparsify_polytope(poly, eps_prime)
        expanded = rep.expanded_hull
        hk_expanded = held_karp(list(expanded.vertices))
        snap = snap_report(expanded, eps_prime)

        verts = expanded.as_array()
        tour_cells = [snap.cells[int(np.argmin(np.linalg.norm(verts - w, axis=1)))]
                      for w in hk_expanded.waypoints]
        looped = loop_tour_through_cells(hk_expanded, tour_cells)

        snapped_pts = snap.polytope.as_array()
        keep, seen = [], set()
        for idx, w in enumerate(looped.waypoints):
            dist = np.linalg.norm(snapped_pts - w, axis=1)
            j = int(np.argmin(dist))
            if dist[j] <= 1e-9 and j not in seen:
                seen.add(j)
                keep.append(idx)
        assert len(seen) == len(snapped_pts), "loop tour missed a snapped vertex"
        certified = tour_length(Tour(tuple(looped.waypoints[k] for k in keep), closed=True))

        limit = (1 + eps_prime) ** 2 * hk_original
        assert certified <= limit + 1e-9, f"case {i}: {certified} > {limit}"
        if len(snapped_pts) <= 15:
            exact = tour_length(held_karp(list(snap.polytope.vertices)))
            assert exact <= limit + 1e-9, f"case {i} exact: {exact} > {limit}"
            exact_checked += 1
    assert exact_checked > 0
    _report(7, f"scaled tour pipeline bound (exact DP on {exact_checked})", t0, 300)


def test_criterion_08_ellipsoid_normalization():
    """100 random polytopes: after normalization the inscribed ball has radius
    1 within 1e-3 and every vertex sits within d*(1+1e-3)."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(88)
    for i in range(100):
        d = 2 if i < 60 else 3
        poly = random_polytope_v(rng, int(rng.integers(d + 2, 25)), d)
        ph = polytope_h_from_vertices(poly.as_array())
        _, pn = normalize_polytope(ph)
        _, rho = pn.inequalities()
        assert float((-rho).min()) == pytest.approx(1.0, abs=1e-3), f"case {i}"
        radii = np.linalg.norm(vertex_enumerate(pn).as_array(), axis=1)
        assert radii.max() <= d * (1 + 1e-3), f"case {i}"
    _report(8, "ellipsoid normalization", t0, 300)


def test_criterion_09_baseline_sanity():
    """Box perimeter for {x=0, x=2, y=0, y=1} is exactly 6; the exact DP tour
    of the unit-square corners is 4."""
    t0 = time.perf_counter()
    rec = min_box_tour(parse_instance("2 4\n1 0 0\n1 0 2\n0 1 0\n0 1 1"))
    assert rec.length == pytest.approx(6.0, abs=TAU)
    hk = tour_length(held_karp([(0, 0), (1, 0), (1, 1), (0, 1)]))
    assert hk == pytest.approx(4.0, abs=TAU)
    _report(9, "baseline sanity", t0, 60)


def test_criterion_10_path_variant():
    """Open paths never exceed closed tours on fuzz instances; the open path
    through the unit-square corners is exactly 3."""
    t0 = time.perf_counter()
    assert tour_length(held_karp([(0, 0), (1, 0), (1, 1), (0, 1)], closed=False)) \
        == pytest.approx(3.0, abs=TAU)
    for i in range(25):
        d = 2 if i % 2 else 3
        inst = gen_instance(d, 1 + i % 6, seed=500 + i)
        cfg_c = RunConfig(epsilon=0.5, samples=12, config_cap=6, order_cap=4, seed=i)
        cfg_p = RunConfig(epsilon=0.5, samples=12, config_cap=6, order_cap=4, seed=i,
                          path_mode=True)
        closed = run_ptas(inst, cfg_c)
        opened = run_ptas(inst, cfg_p)
        assert opened.length <= closed.length + 1e-9, f"seed {500 + i}"
        assert tour_feasible(opened.tour, inst.geometry()).feasible
    for i in range(15):
        inst = gen_instance(2, 1 + i % 6, seed=900 + i)
        closed = local_search_oracle(inst, restarts=3, seed=i)
        opened = local_search_oracle(inst, restarts=3, seed=i, path_mode=True)
        assert opened.length <= closed.length + 1e-9
    _report(10, "path variant", t0, 120)
