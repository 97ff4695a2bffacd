"""Instance/result file formats, validation and run configuration.

Instance files are plain text with integer coefficients: a `d n` header, then
n lines of d+1 integers (a_1 .. a_d c) for the hyperplane a.x = c. Results are
JSON objects with a fixed key order so reports diff cleanly.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionOutOfRange, ParseError, ZeroNormal
from .geometry import DIM_MAX, DIM_MIN, FeasibilityReport, Hyperplane, Tour, tour_length

TOL = 1e-9


@dataclass(frozen=True)
class Instance:
    dimension: int
    hyperplanes: tuple  # of (a_1, ..., a_d, c) integer tuples

    def __post_init__(self):
        if not (DIM_MIN <= self.dimension <= DIM_MAX):
            raise DimensionOutOfRange(f"dimension {self.dimension} not in [{DIM_MIN}, {DIM_MAX}]")
        if not self.hyperplanes:
            raise ParseError("instance needs at least one hyperplane")
        for row in self.hyperplanes:
            if len(row) != self.dimension + 1:
                raise ParseError(f"expected {self.dimension + 1} integers per hyperplane, got {len(row)}")
            if all(a == 0 for a in row[:-1]):
                raise ZeroNormal(f"hyperplane {row} has zero normal")

    @property
    def n(self):
        return len(self.hyperplanes)

    def geometry(self):
        """Canonical unit-normal hyperplanes for the integer rows."""
        return [Hyperplane.from_coefficients(row[:-1], row[-1]) for row in self.hyperplanes]


def parse_instance(text: str) -> Instance:
    lines = text.splitlines()
    rows = [(i + 1, ln.strip()) for i, ln in enumerate(lines) if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise ParseError("empty instance file")
    lineno, header = rows[0]
    parts = header.split()
    if len(parts) != 2:
        raise ParseError("header must be 'd n'", line=lineno)
    try:
        d, n = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError("header must contain two integers", line=lineno)
    if not (DIM_MIN <= d <= DIM_MAX):
        raise DimensionOutOfRange(f"dimension {d} not in [{DIM_MIN}, {DIM_MAX}]")
    if n < 1:
        raise ParseError("instance needs at least one hyperplane", line=lineno)
    if len(rows) - 1 != n:
        raise ParseError(f"expected {n} hyperplane lines, found {len(rows) - 1}")
    planes = []
    for lineno, ln in rows[1:]:
        parts = ln.split()
        if len(parts) != d + 1:
            raise ParseError(f"expected {d + 1} integers", line=lineno)
        try:
            row = tuple(int(p) for p in parts)
        except ValueError:
            raise ParseError("coefficients must be integers", line=lineno)
        if all(a == 0 for a in row[:-1]):
            raise ZeroNormal(f"line {lineno}: hyperplane normal is all zeros")
        planes.append(row)
    return Instance(d, tuple(planes))


def format_instance(inst: Instance) -> str:
    out = [f"{inst.dimension} {inst.n}"]
    out += [" ".join(str(a) for a in row) for row in inst.hyperplanes]
    return "\n".join(out) + "\n"


def validate_instance(inst: Instance):
    """Non-fatal warnings: duplicate hyperplanes, all-parallel families."""
    warnings = []
    geoms = inst.geometry()
    seen = {}
    for i, h in enumerate(geoms):
        k = h.key()
        if k in seen:
            warnings.append(f"hyperplane {i} duplicates hyperplane {seen[k]}")
        else:
            seen[k] = i
    if inst.n > 1:
        first = geoms[0].normal
        if all(np.allclose(h.normal, first, atol=TOL) or np.allclose(h.normal, -first, atol=TOL) for h in geoms):
            warnings.append("all hyperplanes are parallel; the optimum degenerates to a back-and-forth segment")
    return warnings


@dataclass(frozen=True)
class RunConfig:
    epsilon: float = 0.5
    base_set_mode: str = "axis"  # "full" | "axis" | path to a normals file
    order_cap: int = 12
    config_cap: int = 24
    path_mode: bool = False
    seed: int = 0
    samples: int = 64
    jobs: int = 1

    def __post_init__(self):
        if not (0 < self.epsilon <= 2):
            raise ValueError("epsilon must lie in (0, 2]")
        if self.order_cap < 1 or self.config_cap < 1:
            raise ValueError("caps must be >= 1")
        if self.samples < 1 or self.jobs < 1:
            raise ValueError("samples and jobs must be >= 1")


@dataclass(frozen=True, eq=False)
class ResultRecord:
    algorithm: str
    tour: Tour
    length: float
    feasibility: FeasibilityReport
    counters: dict = field(default_factory=dict)
    wall_ms: float = 0.0

    def __post_init__(self):
        if not math.isclose(self.length, tour_length(self.tour), rel_tol=0.0, abs_tol=TOL):
            raise ValueError("recorded length disagrees with tour_length")


def make_record(algorithm, tour, report, counters=None, wall_ms=0.0):
    return ResultRecord(algorithm, tour, tour_length(tour), report, dict(counters or {}), wall_ms)


def write_result(r: ResultRecord) -> str:
    """Serialize with fixed key order; the '-path' tag suffix marks open tours."""
    payload = {
        "algorithm": r.algorithm,
        "length": r.length,
        "feasible": r.feasibility.feasible,
        "waypoints": [[float(x) for x in p] for p in r.tour.waypoints],
        "witnesses": [None if w is None else [float(x) for x in w] for w in r.feasibility.witnesses],
        "counters": r.counters,
        "wall_ms": r.wall_ms,
    }
    return json.dumps(payload, indent=2) + "\n"


def read_result(text: str) -> ResultRecord:
    data = json.loads(text)
    closed = not data["algorithm"].endswith("-path")
    tour = Tour.of(data["waypoints"], closed=closed)
    witnesses = tuple(None if w is None else np.asarray(w, dtype=float) for w in data["witnesses"])
    visited = tuple(w is not None for w in witnesses)
    report = FeasibilityReport(data["feasible"], visited, witnesses)
    return ResultRecord(data["algorithm"], tour, data["length"], report, dict(data["counters"]), data["wall_ms"])


def records_equal(a: ResultRecord, b: ResultRecord) -> bool:
    if (a.algorithm, a.wall_ms, a.counters) != (b.algorithm, b.wall_ms, b.counters):
        return False
    if a.length != b.length or a.tour.closed != b.tour.closed:
        return False
    if len(a.tour.waypoints) != len(b.tour.waypoints):
        return False
    if any(not np.array_equal(p, q) for p, q in zip(a.tour.waypoints, b.tour.waypoints)):
        return False
    if a.feasibility.feasible != b.feasibility.feasible:
        return False
    for w, v in zip(a.feasibility.witnesses, b.feasibility.witnesses):
        if (w is None) != (v is None):
            return False
        if w is not None and not np.array_equal(w, v):
            return False
    return True
