"""LP construction and solving for one (configuration, order, guess) triple.

Variables are one free shift per signed base half-space plus d free
coordinates per configuration element. Constraints: incidence equalities
pinning each element's vertex onto its shifted boundaries, per-input-hyperplane
separation inequalities on the token-walk extremal pair, and per-edge angle
constraints confining each tour edge to its guessed sign/ratio band, which is
what makes the edge-length proxy linear.
"""

from dataclasses import dataclass

import numpy as np

from . import simplex
from .base_sets import BaseSet
from .enumeration import Configuration, DirectionGuess, EdgeGuess, build_arc_graph, separated_pair
from .errors import GuessMismatch, NumericalFailure
from .geometry import Tour

TAU_LP = 1e-7


@dataclass(frozen=True, eq=False)
class LpModel:
    base: BaseSet
    config: Configuration
    order: tuple
    guess: DirectionGuess
    instance_planes: tuple
    path_mode: bool
    c: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray
    separated: tuple  # per input hyperplane: (element_plus, element_minus)

    @property
    def dim(self):
        return self.base.dim

    @property
    def n_rho(self):
        return len(self.base.signed)

    @property
    def n_vars(self):
        return self.n_rho + self.dim * len(self.config)

    @property
    def n_incidence(self):
        return self.A_eq.shape[0]

    @property
    def n_separation(self):
        return 2 * len(self.instance_planes)


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: str
    objective: float | None
    rho: np.ndarray | None
    xs: np.ndarray | None  # (|C|, d) vertex positions
    model: LpModel


def tour_edges(order, k, path_mode):
    """Consecutive index pairs of the visit order."""
    pairs = list(zip(order, order[1:]))
    if not path_mode and k > 1:
        pairs.append((order[-1], order[0]))
    return pairs


def build_lp(config: Configuration, order, guess: DirectionGuess, base: BaseSet,
             instance_planes, path_mode=False) -> LpModel:
    d = base.dim
    S = len(base.signed)
    k = len(config)
    if tuple(sorted(order)) != tuple(range(k)):
        raise ValueError("order must permute the configuration elements")
    edges = tour_edges(order, k, path_mode)
    if len(guess.edges) != len(edges):
        raise ValueError(f"guess covers {len(guess.edges)} edges, tour has {len(edges)}")
    n = S + d * k

    def xcol(elem, coord):
        return S + elem * d + coord

    eq_rows, ub_rows, ub_rhs = [], [], []
    for i, elem in enumerate(config.elements):
        for s in sorted(elem):
            row = np.zeros(n)
            row[xcol(i, 0):xcol(i, 0) + d] = base.signed[s].inward_normal
            row[s] = -1.0
            eq_rows.append(row)

    graph = build_arc_graph(config, base)
    separated = []
    for h in instance_planes:
        plus, minus = separated_pair(graph, h.normal)
        separated.append((plus, minus))
        row = np.zeros(n)
        row[xcol(plus, 0):xcol(plus, 0) + d] = -h.normal
        ub_rows.append(row)
        ub_rhs.append(-h.offset)
        row = np.zeros(n)
        row[xcol(minus, 0):xcol(minus, 0) + d] = h.normal
        ub_rows.append(row)
        ub_rhs.append(h.offset)

    c = np.zeros(n)
    for (a, b), g in zip(edges, guess.edges):
        coef = g.length_coefficient()
        smax = g.signs[g.lmax]
        c[xcol(b, g.lmax)] += coef * smax
        c[xcol(a, g.lmax)] -= coef * smax

        def edge_row(coord, sign):
            row = np.zeros(n)
            row[xcol(b, coord)] += sign
            row[xcol(a, coord)] -= sign
            return row

        ub_rows.append(-edge_row(g.lmax, smax))
        ub_rhs.append(0.0)
        bands = g.bands()
        for l in range(d):
            if l == g.lmax:
                continue
            lo, hi = bands[l]
            ub_rows.append(-edge_row(l, g.signs[l]))
            ub_rhs.append(0.0)
            ub_rows.append(edge_row(l, g.signs[l]) - hi * edge_row(g.lmax, smax))
            ub_rhs.append(0.0)
            if not g.small[l]:
                ub_rows.append(lo * edge_row(g.lmax, smax) - edge_row(l, g.signs[l]))
                ub_rhs.append(0.0)

    A_eq = np.array(eq_rows) if eq_rows else np.zeros((0, n))
    A_ub = np.array(ub_rows) if ub_rows else np.zeros((0, n))
    return LpModel(base, config, tuple(order), guess, tuple(instance_planes), path_mode,
                   c, A_eq, np.zeros(A_eq.shape[0]), A_ub, np.array(ub_rhs), tuple(separated))


def solve_lp(model: LpModel) -> LpSolution:
    res = simplex.solve_lp_arrays(model.c, A_ub=model.A_ub, b_ub=model.b_ub,
                                  A_eq=model.A_eq, b_eq=model.b_eq)
    if res.status != simplex.OPTIMAL:
        return LpSolution(res.status, None, None, None, model)
    y = res.x
    scale = 1.0 + float(np.abs(y).max(initial=0.0))
    if model.A_eq.size and float(np.abs(model.A_eq @ y - model.b_eq).max()) > TAU_LP * scale:
        raise NumericalFailure("equality residual above tolerance")
    if model.A_ub.size and float((model.A_ub @ y - model.b_ub).max()) > TAU_LP * scale:
        raise NumericalFailure("inequality violation above tolerance")
    S = model.n_rho
    xs = y[S:].reshape(len(model.config), model.dim)
    return LpSolution(simplex.OPTIMAL, res.objective, y[:S].copy(), xs, model)


def extract_tour(sol: LpSolution, order=None) -> Tour:
    if sol.status != simplex.OPTIMAL:
        raise ValueError("no tour in a non-optimal solution")
    order = sol.model.order if order is None else order
    pts = tuple(sol.xs[i].copy() for i in order)
    return Tour(pts, closed=not sol.model.path_mode)


def approx_length(v, guess: EdgeGuess, tol=1e-9) -> float:
    """Linear edge-length proxy |v_lmax| * sqrt(sum of squared ratios).

    Raises GuessMismatch unless v lies in the guess's sign/ratio bands, which
    is the premise of the proxy's sandwich guarantee.
    """
    v = np.asarray(v, dtype=float)
    absv = np.abs(v)
    vmax = float(absv[guess.lmax])
    scale = tol * (1.0 + float(absv.max(initial=0.0)))
    if vmax < float(absv.max()) - scale:
        raise GuessMismatch("guessed dominant coordinate is not maximal")
    if v[guess.lmax] * guess.signs[guess.lmax] < -scale:
        raise GuessMismatch("dominant coordinate sign differs from guess")
    bands = guess.bands()
    for l in range(v.size):
        if l == guess.lmax:
            continue
        if v[l] * guess.signs[l] < -scale:
            raise GuessMismatch(f"sign of coordinate {l} differs from guess")
        lo, hi = bands[l]
        if not (lo * vmax - scale <= absv[l] <= hi * vmax + scale):
            raise GuessMismatch(f"coordinate {l} outside the guessed ratio band")
    return vmax * guess.length_coefficient()
