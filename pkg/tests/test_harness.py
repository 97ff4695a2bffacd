import json
import math

import numpy as np
import pytest

from tspn.baselines import min_box_tour
from tspn.errors import DimensionUnsupported
from tspn.geometry import Tour
from tspn.harness import compare, emit_svg, gen_instance, run_ptas
from tspn.instances import RunConfig, parse_instance, read_result

SQUARE = "2 4\n1 0 0\n1 0 1\n0 1 0\n0 1 1"


def test_run_ptas_square_instance():
    inst = parse_instance(SQUARE)
    cfg = RunConfig(epsilon=0.25, samples=48, config_cap=16, order_cap=8, seed=0)
    rec = run_ptas(inst, cfg)
    assert rec.feasibility.feasible
    assert rec.length <= 1.25 * 2 * math.sqrt(2) + 1e-9
    assert rec.counters["lps_solved"] > 0


def test_run_ptas_single_hyperplane():
    inst = parse_instance("2 1\n1 2 5")
    rec = run_ptas(inst, RunConfig(epsilon=0.5, samples=8, seed=1))
    assert rec.length == pytest.approx(0.0, abs=1e-7)


def test_run_ptas_bound_against_box_fuzz():
    for seed in range(12):
        d = 2 if seed % 2 else 3
        inst = gen_instance(d, 1 + seed % 5, seed + 7)
        eps = [0.25, 0.5, 1.0][seed % 3]
        cfg = RunConfig(epsilon=eps, samples=16, config_cap=8, order_cap=4, seed=seed)
        rec = run_ptas(inst, cfg)
        box = min_box_tour(inst)
        assert rec.feasibility.feasible
        assert rec.length <= (1 + eps) * box.length + 1e-6 * max(1.0, box.length)


def test_run_ptas_deterministic():
    inst = parse_instance(SQUARE)
    cfg = RunConfig(epsilon=0.5, samples=24, config_cap=10, order_cap=6, seed=3)
    a = run_ptas(inst, cfg)
    b = run_ptas(inst, cfg)
    assert a.length == b.length
    assert all(np.array_equal(p, q) for p, q in zip(a.tour.waypoints, b.tour.waypoints))


def test_run_ptas_monotone_in_caps():
    inst = gen_instance(2, 5, 11)
    small = RunConfig(epsilon=0.5, samples=32, config_cap=4, order_cap=2, seed=2)
    large = RunConfig(epsilon=0.5, samples=32, config_cap=12, order_cap=6, seed=2)
    assert run_ptas(inst, large).length <= run_ptas(inst, small).length + 1e-12


def test_run_ptas_jobs_parallel_matches_serial():
    inst = parse_instance(SQUARE)
    serial = run_ptas(inst, RunConfig(epsilon=0.5, samples=16, config_cap=8, seed=4, jobs=1))
    parallel = run_ptas(inst, RunConfig(epsilon=0.5, samples=16, config_cap=8, seed=4, jobs=2))
    assert serial.length == parallel.length
    assert all(np.array_equal(p, q) for p, q in
               zip(serial.tour.waypoints, parallel.tour.waypoints))


def test_run_ptas_path_mode():
    inst = parse_instance(SQUARE)
    cfg_closed = RunConfig(epsilon=0.5, samples=24, config_cap=10, seed=0)
    cfg_path = RunConfig(epsilon=0.5, samples=24, config_cap=10, seed=0, path_mode=True)
    closed = run_ptas(inst, cfg_closed)
    path = run_ptas(inst, cfg_path)
    assert not path.tour.closed
    assert path.length <= closed.length + 1e-9
    assert path.algorithm == "ptas-path"


def test_compare_outputs():
    inst = parse_instance(SQUARE)
    cfg = RunConfig(epsilon=0.5, samples=24, config_cap=10, seed=0)
    records, table, payload = compare(inst, cfg)
    assert set(records) == {"ptas", "min-box", "local-search"}
    assert "algorithm" in table.splitlines()[0]
    for name, row in payload.items():
        assert math.isfinite(row["ratio"]) and row["ratio"] >= 1.0
    assert records["ptas"].length <= records["min-box"].length + 1e-9


def test_compare_degenerate_concurrent():
    inst = parse_instance("2 3\n1 0 1\n0 1 1\n1 1 2")
    cfg = RunConfig(epsilon=0.5, samples=16, config_cap=8, seed=0)
    records, _, _ = compare(inst, cfg)
    for rec in records.values():
        assert rec.length <= 1e-6


def test_emit_svg_shape(tmp_path):
    inst = parse_instance(SQUARE)
    square_tour = Tour.of([(0, 0), (1, 0), (1, 1), (0, 1)], closed=True)
    path = tmp_path / "fig.svg"
    text = emit_svg(inst, [square_tour], str(path))
    assert text.count("<line ") == 4
    assert text.count("<polygon") == 1  # closed tour renders as one polygon
    assert path.read_text() == text
    segment = Tour.of([(0, 0), (1, 1)], closed=True)
    assert emit_svg(inst, [segment], str(path)).count("<polyline") == 1
    lines_only = emit_svg(inst, [], str(path))
    assert "<polyline" not in lines_only and "<polygon" not in lines_only


def test_emit_svg_deterministic(tmp_path):
    inst = parse_instance(SQUARE)
    tour = Tour.of([(0, 0), (1, 0), (1, 1), (0, 1)], closed=True)
    a = emit_svg(inst, [tour], str(tmp_path / "a.svg"))
    b = emit_svg(inst, [tour], str(tmp_path / "b.svg"))
    assert a == b
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


def test_emit_svg_rejects_3d(tmp_path):
    inst = parse_instance("3 1\n1 0 0 0")
    with pytest.raises(DimensionUnsupported):
        emit_svg(inst, [], str(tmp_path / "x.svg"))


def test_run_ptas_custom_base_without_axis_normals(tmp_path):
    normals = tmp_path / "diag.txt"
    normals.write_text("1 1\n1 -1\n")
    inst = parse_instance(SQUARE)
    cfg = RunConfig(epsilon=0.5, base_set_mode=str(normals), samples=32,
                    config_cap=12, seed=0)
    rec = run_ptas(inst, cfg)
    assert rec.counters.get("seed_skipped") is True
    assert rec.feasibility.feasible
    assert rec.length == pytest.approx(2 * math.sqrt(2), abs=1e-6)


def test_run_ptas_dimension_four(tmp_path):
    normals = tmp_path / "coord4.txt"
    normals.write_text("1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n")
    inst = gen_instance(4, 5, seed=2)
    cfg = RunConfig(epsilon=1.0, base_set_mode=str(normals), samples=6,
                    config_cap=4, order_cap=3, seed=0)
    rec = run_ptas(inst, cfg)
    box = min_box_tour(inst)
    assert rec.feasibility.feasible
    assert rec.length <= 2 * box.length + 1e-6


def test_gen_instance_valid():
    inst = gen_instance(3, 12, 0)
    assert inst.n == 12
    assert len(set(inst.hyperplanes)) == 12
    assert all(any(a != 0 for a in row[:-1]) for row in inst.hyperplanes)


def test_cli_round_trip(tmp_path, capsys):
    from tspn.cli import main

    inst_file = tmp_path / "inst.txt"
    assert main(["gen", "--dim", "2", "--n", "4", "--seed", "9",
                 "--out", str(inst_file)]) == 0
    out_file = tmp_path / "result.json"
    svg_file = tmp_path / "fig.svg"
    code = main(["solve", str(inst_file), "--epsilon", "0.5", "--samples", "16",
                 "--jobs", "1", "--out", str(out_file), "--svg", str(svg_file)])
    assert code == 0
    rec = read_result(out_file.read_text())
    assert rec.feasibility.feasible
    assert svg_file.exists()


def test_cli_parse_error(tmp_path):
    from tspn.cli import main

    bad = tmp_path / "bad.txt"
    bad.write_text("2 1\n0 0 5\n")
    assert main(["solve", str(bad)]) == 2
