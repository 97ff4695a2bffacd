"""Enumeration of configurations, visit orders and edge-direction guesses.

A configuration is an antichain of half-space subsets, each pinning a
candidate vertex through the incidence structure of a polytope whose facets
are parallel to the base set. The arc graph over the configuration supports a
simplex-like token walk that locates, for any direction, the element whose
realized vertex is extremal; those pairs drive the per-hyperplane separation
constraints of the search LPs.

Blind antichain enumeration is provided for small cases; the sampler draws
random shift vectors (optionally collapsing some slabs to width zero) and
reads configurations off realized polytopes, which keeps desk-scale runs
inside the realizable part of the search space.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .base_sets import BaseSet
from .errors import DegenerateConfiguration
from .geometry import PolytopeH, vertex_enumerate


def delta(eps: float, d: int) -> float:
    """Ratio-grid step bound: min of the three admissible expressions."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    a = math.sqrt(((1 + eps) ** 2 - 1) / d)
    b = math.sqrt((1 - (1 + eps) ** -2) / d)
    return min(a, b, eps)


def ratio_grid(dlt: float):
    """Multiplicative ratio grid {dlt/2} then (1+dlt)^(2i+1)*dlt until >= 1."""
    if not (0 < dlt < 1):
        raise ValueError("delta must lie in (0, 1)")
    grid = [dlt / 2]
    i = 0
    while True:
        r = (1 + dlt) ** (2 * i + 1) * dlt
        grid.append(r)
        if r >= 1:
            return grid
        i += 1


class Counters(dict):
    """Plain dict with a convenience increment."""

    def tick(self, key, by=1):
        self[key] = self.get(key, 0) + by


@dataclass(frozen=True)
class Configuration:
    """Antichain of signed half-space index sets, each of boundary rank d."""

    elements: tuple  # of frozensets of indices into base.signed

    def __post_init__(self):
        elems = tuple(sorted((frozenset(e) for e in self.elements), key=lambda e: tuple(sorted(e))))
        object.__setattr__(self, "elements", elems)
        for a, b in itertools.combinations(elems, 2):
            if a <= b or b <= a:
                raise DegenerateConfiguration(f"comparable elements {sorted(a)} and {sorted(b)}")

    def __len__(self):
        return len(self.elements)

    def key(self):
        return tuple(tuple(sorted(e)) for e in self.elements)


def element_rank(base: BaseSet, element) -> int:
    normals = np.array([base.signed[i].boundary.normal for i in sorted(element)])
    return int(np.linalg.matrix_rank(normals, tol=1e-9))


def element_valid(base: BaseSet, element) -> bool:
    d = base.dim
    return len(element) >= d and element_rank(base, element) == d


def valid_elements(base: BaseSet, size_cap=None):
    """All subsets of signed half-spaces with boundary rank d, sizes d..size_cap."""
    d = base.dim
    size_cap = d if size_cap is None else size_cap
    out = []
    indices = range(len(base.signed))
    for size in range(d, size_cap + 1):
        for combo in itertools.combinations(indices, size):
            e = frozenset(combo)
            if element_valid(base, e):
                out.append(e)
    return out


def enumerate_configurations(base: BaseSet, cap=None, element_size_cap=None,
                             max_config_size=None, counters=None):
    """Blind antichain enumeration, smallest configurations first.

    Deterministic order: by configuration size, then lexicographic element
    combination. Stops at cap and flags truncation in the counters.
    """
    counters = counters if counters is not None else Counters()
    elements = valid_elements(base, element_size_cap)
    limit = len(elements) if max_config_size is None else min(max_config_size, len(elements))
    yielded = 0
    for size in range(1, limit + 1):
        for combo in itertools.combinations(elements, size):
            if any(a <= b or b <= a for a, b in itertools.combinations(combo, 2)):
                continue
            if cap is not None and yielded >= cap:
                counters["configs_truncated"] = True
                return
            yielded += 1
            yield Configuration(combo)


@dataclass(frozen=True, eq=False)
class SampledRealization:
    """A configuration together with vertex positions realizing it."""

    config: Configuration
    vertices: tuple  # aligned with config.elements


def realize_configuration(base: BaseSet, shifts, active_tol=1e-7):
    """Read the configuration off the polytope with the given shifts."""
    P = PolytopeH(base.signed, np.asarray(shifts, dtype=float))
    V = vertex_enumerate(P)
    d = base.dim
    pairs = []
    for v in V.vertices:
        act = frozenset(P.active_indices(v, active_tol))
        if len(act) < d or element_rank(base, act) != d:
            raise DegenerateConfiguration("vertex with deficient active set")
        pairs.append((act, v))
    config = Configuration(tuple(act for act, _ in pairs))
    by_key = {tuple(sorted(act)): v for act, v in pairs}
    verts = tuple(by_key[tuple(sorted(e))] for e in config.elements)
    return SampledRealization(config, verts)


def sample_configurations(base: BaseSet, samples, seed, counters=None, degenerate=True):
    """Realizable configurations from random shift vectors, deduplicated.

    Each sample picks a center z, optionally collapses up to d-1 slabs to
    width zero (those produce the lower-dimensional polytopes behind
    back-and-forth tours), and draws the remaining slab widths at random.
    Returns realizations sorted by configuration size then key.
    """
    counters = counters if counters is not None else Counters()
    rng = np.random.default_rng(seed)
    d = base.dim
    nh = len(base.hyperplanes)
    found = {}
    for _ in range(samples):
        k_degen = int(rng.integers(0, d)) if degenerate else 0
        degen = set(rng.choice(nh, size=k_degen, replace=False).tolist()) if k_degen else set()
        z = rng.uniform(-1.0, 1.0, d)
        shifts = np.empty(2 * nh)
        for j, h in enumerate(base.hyperplanes):
            nz = float(h.normal @ z)
            lo = nz if j in degen else nz - rng.uniform(0.15, 1.2)
            hi = nz if j in degen else nz + rng.uniform(0.15, 1.2)
            shifts[2 * j] = lo
            shifts[2 * j + 1] = -hi
        try:
            real = realize_configuration(base, shifts)
        except DegenerateConfiguration:
            counters.tick("samples_degenerate")
            continue
        found.setdefault(real.config.key(), real)
    ordered = sorted(found.values(), key=lambda r: (len(r.config), r.config.key()))
    counters.tick("configs_sampled", by=len(ordered))
    return ordered


@dataclass(frozen=True, eq=False)
class ArcGraph:
    """Directed graph over configuration elements with unit arc directions."""

    n_nodes: int
    arcs: dict  # (i, j) -> direction ndarray


def _common_line_direction(base: BaseSet, shared):
    """Unit direction of the intersection of the shared boundary hyperplanes,
    or None if that intersection is not one-dimensional."""
    if not shared:
        return None
    normals = np.array([base.signed[i].boundary.normal for i in sorted(shared)])
    _, s, vt = np.linalg.svd(normals)
    d = normals.shape[1]
    rank = int(np.sum(s > 1e-9))
    if rank != d - 1:
        return None
    return vt[-1]


def build_arc_graph(config: Configuration, base: BaseSet) -> ArcGraph:
    """Classify each element pair by the sign pattern of the exclusive normals.

    A one-sign pattern orients the shared line into an arc; a mixed or
    all-zero pattern contributes no arc (the token walk later discards
    configurations it cannot certify).
    """
    arcs = {}
    elems = config.elements
    for i, j in itertools.permutations(range(len(elems)), 2):
        e = _common_line_direction(base, elems[i] & elems[j])
        if e is None:
            continue
        dots = [float(base.signed[s].inward_normal @ e) for s in sorted(elems[i] - elems[j])]
        pos = any(x > 1e-12 for x in dots)
        neg = any(x < -1e-12 for x in dots)
        if pos and not neg:
            arcs[(i, j)] = e
        elif neg and not pos:
            arcs[(i, j)] = -e
    return ArcGraph(len(elems), arcs)


def _walk(graph: ArcGraph, score, tol=1e-12):
    node = 0
    seen = {0}
    while True:
        moves = [j for (i, j), e in graph.arcs.items() if i == node and score(e) > tol]
        if not moves:
            return node
        node = min(moves)
        if node in seen:
            raise DegenerateConfiguration("token walk revisited a node")
        seen.add(node)


def separated_pair(graph: ArcGraph, direction):
    """Elements extremal along +-direction, found by the token walk."""
    n = np.asarray(direction, dtype=float)
    c_plus = _walk(graph, lambda e: float(e @ n))
    c_minus = _walk(graph, lambda e: -float(e @ n))
    return c_plus, c_minus


def enumerate_orders(k: int, cap=None, counters=None):
    """Cyclic-order-distinct permutations of range(k): first element fixed,
    reflections halved. Deterministic lexicographic order."""
    counters = counters if counters is not None else Counters()
    if k < 1:
        raise ValueError("need at least one element")
    yielded = 0
    if k <= 2:
        yield tuple(range(k))
        return
    for perm in itertools.permutations(range(1, k)):
        if perm[0] > perm[-1]:
            continue  # reflection representative
        if cap is not None and yielded >= cap:
            counters["orders_truncated"] = True
            return
        yielded += 1
        yield (0,) + perm


@dataclass(frozen=True)
class EdgeGuess:
    """Guessed shape of one tour edge: dominant coordinate, signs, ratio bands.

    ratios[lmax] is fixed to 1; small[l] marks the below-delta band [0, delta]
    in place of the multiplicative band around ratios[l].
    """

    lmax: int
    signs: tuple
    ratios: tuple
    small: tuple
    delta: float

    def length_coefficient(self):
        return math.sqrt(sum(r * r for r in self.ratios))

    def bands(self):
        """Per-coordinate (lower, upper) ratio bounds relative to |v_lmax|."""
        out = []
        for l, r in enumerate(self.ratios):
            if l == self.lmax:
                out.append((1.0, 1.0))
            elif self.small[l]:
                out.append((0.0, self.delta))
            else:
                out.append((r / (1 + self.delta), r * (1 + self.delta)))
        return out


@dataclass(frozen=True)
class DirectionGuess:
    edges: tuple  # of EdgeGuess
    delta: float


def _edge_options(dlt, d):
    grid = ratio_grid(dlt)
    per_coord = [(grid[0], +1, True), (grid[0], -1, True)]
    per_coord += [(r, s, False) for r in grid[1:] for s in (+1, -1)]
    options = []
    for lmax in range(d):
        for sgn in (+1, -1):
            others = [c for c in range(d) if c != lmax]
            for picks in itertools.product(per_coord, repeat=len(others)):
                ratios = [0.0] * d
                signs = [0] * d
                small = [False] * d
                ratios[lmax], signs[lmax] = 1.0, sgn
                for c, (r, s, sm) in zip(others, picks):
                    ratios[c], signs[c], small[c] = r, s, sm
                options.append(EdgeGuess(lmax, tuple(signs), tuple(ratios), tuple(small), dlt))
    return options


def enumerate_direction_guesses(dlt, d, edges, cap=None, counters=None):
    """Cartesian product of per-edge guesses, streamed with a cap."""
    counters = counters if counters is not None else Counters()
    options = _edge_options(dlt, d)
    yielded = 0
    for combo in itertools.product(options, repeat=edges):
        if cap is not None and yielded >= cap:
            counters["guesses_truncated"] = True
            return
        yielded += 1
        yield DirectionGuess(tuple(combo), dlt)


def covering_guess_for_vector(v, dlt) -> EdgeGuess:
    """The enumerated guess whose bands contain the given edge vector."""
    v = np.asarray(v, dtype=float)
    d = v.size
    grid = ratio_grid(dlt)
    absv = np.abs(v)
    lmax = int(np.argmax(absv))
    vmax = absv[lmax]
    signs = [0] * d
    ratios = [0.0] * d
    small = [False] * d
    signs[lmax] = +1 if v[lmax] >= 0 else -1
    ratios[lmax] = 1.0
    for l in range(d):
        if l == lmax:
            continue
        signs[l] = +1 if v[l] >= 0 else -1
        t = absv[l] / vmax if vmax > 0 else 0.0
        if t < dlt:
            ratios[l], small[l] = grid[0], True
        else:
            for r in grid[1:]:
                if r / (1 + dlt) <= t <= r * (1 + dlt):
                    ratios[l] = r
                    break
            else:  # float fringe: snap to the closest band edge
                ratios[l] = min(grid[1:], key=lambda r: abs(math.log(r / t)) if t > 0 else r)
    return EdgeGuess(lmax, tuple(signs), tuple(ratios), tuple(small), dlt)


def covering_guess_for_edges(vectors, dlt) -> DirectionGuess:
    return DirectionGuess(tuple(covering_guess_for_vector(v, dlt) for v in vectors), dlt)
