"""TSP with hyperplane neighborhoods: LP-based search, structural
sparsification machinery, and reference baselines."""

from .base_sets import BaseSet, build_base_set, grid_granularity, hyperplane_from_tuple, k_eps_d
from .baselines import held_karp, local_search_oracle, min_box_tour
from .enumeration import (Configuration, DirectionGuess, EdgeGuess, build_arc_graph,
                          covering_guess_for_edges, covering_guess_for_vector, delta,
                          enumerate_configurations, enumerate_direction_guesses,
                          enumerate_orders, ratio_grid, sample_configurations, separated_pair)
from .geometry import (FeasibilityReport, HalfSpace, Hyperplane, PolytopeH, PolytopeV, Tour,
                       polytope_intersects_hyperplane, scale_points, shortcut_tour,
                       tour_feasible, tour_length, vertex_enumerate)
from .harness import compare, emit_svg, gen_instance, run_ptas
from .instances import (Instance, ResultRecord, RunConfig, parse_instance, read_result,
                        validate_instance, write_result)
from .lp import LpModel, LpSolution, approx_length, build_lp, extract_tour, solve_lp
from .sparsify import (Ellipsoid, SparsifyReport, max_inscribed_ellipsoid, normalize_polytope,
                       ray_set, select_sparse_vertices, snap_to_grid, sparsify_polytope)

__version__ = "0.1.0"
