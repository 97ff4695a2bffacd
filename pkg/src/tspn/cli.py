"""Command-line interface: solve, compare, sparsify-demo, gen."""

import argparse
import json
import os
import sys

import numpy as np

from .errors import NoCandidateFound, FeasibilityAssertionError, TspnError, ParseError
from .geometry import PolytopeV
from .harness import compare, emit_svg, gen_instance, run_ptas
from .instances import RunConfig, format_instance, parse_instance, validate_instance, write_result

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NO_CANDIDATE = 3
EXIT_INTERNAL = 4


def _add_common(p):
    p.add_argument("instance", help="instance file ('-' for stdin)")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--base-set", default="axis",
                   help="'axis', 'full', or a path to a normals file")
    p.add_argument("--order-cap", type=int, default=12)
    p.add_argument("--config-cap", type=int, default=24)
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--path", action="store_true", help="open path instead of closed tour")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--svg", metavar="PATH", help="write a 2D figure")
    p.add_argument("--out", metavar="PATH", help="write result JSON here instead of stdout")


def _read_instance(source):
    text = sys.stdin.read() if source == "-" else open(source).read()
    inst = parse_instance(text)
    for w in validate_instance(inst):
        print(f"warning: {w}", file=sys.stderr)
    return inst


def _config(args):
    return RunConfig(epsilon=args.epsilon, base_set_mode=args.base_set,
                     order_cap=args.order_cap, config_cap=args.config_cap,
                     path_mode=args.path, seed=args.seed, samples=args.samples,
                     jobs=args.jobs)


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args):
    inst = _read_instance(args.instance)
    rec = run_ptas(inst, _config(args))
    _emit(write_result(rec), args.out)
    if args.svg:
        emit_svg(inst, [rec.tour], args.svg)
    return EXIT_OK


def cmd_compare(args):
    inst = _read_instance(args.instance)
    records, table, payload = compare(inst, _config(args))
    print(table)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    if args.svg:
        emit_svg(inst, [rec.tour for rec in records.values()], args.svg)
    return EXIT_OK


def cmd_sparsify_demo(args):
    from .sparsify import snap_report, sparsify_polytope

    rng = np.random.default_rng(args.seed)
    raw = rng.normal(size=(args.vertices, args.dim))
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)
    raw *= rng.uniform(1.0, 2.0, (args.vertices, 1))
    from scipy.spatial import ConvexHull

    hull = ConvexHull(raw)
    poly = PolytopeV(tuple(raw[hull.vertices]))
    rep = sparsify_polytope(poly, args.epsilon)
    print(f"vertices: {len(poly.vertices)} -> selected {rep.n_selected} "
          f"(rays {rep.ray_count}, surface hits {rep.n_surface})")
    print(f"containment margin: {rep.containment_margin:.3e}")
    snap = snap_report(rep.expanded_hull, (1 + args.epsilon) ** 0.5 - 1)
    print(f"snapped: granularity {snap.granularity:.6g}, "
          f"{len(snap.polytope.vertices)} grid vertices")
    if args.svg:
        if args.dim != 2:
            print("svg output needs --dim 2", file=sys.stderr)
            return EXIT_PARSE
        from .geometry import Tour
        from .instances import Instance

        inst = Instance(2, ((1, 0, 0),))  # placeholder frame line
        tours = [Tour(tuple(poly.vertices), True), Tour(tuple(rep.expanded_hull.vertices), True)]
        emit_svg(inst, tours, args.svg)
    return EXIT_OK


def cmd_gen(args):
    inst = gen_instance(args.dim, args.n, args.seed, args.coeff)
    text = format_instance(inst)
    _emit(text, args.out)
    return EXIT_OK


def main(argv=None):
    ap = argparse.ArgumentParser(prog="tspn",
                                 description="TSP with hyperplane neighborhoods: "
                                             "LP search, baselines, sparsification demos")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the LP search on an instance")
    _add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("compare", help="LP search vs. box and local-search baselines")
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sparsify-demo", help="sparsify + snap a random polytope")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--vertices", type=int, default=40)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--svg", metavar="PATH")
    p.set_defaults(func=cmd_sparsify_demo)

    p = sub.add_parser("gen", help="generate a random integer instance")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--coeff", type=int, default=5)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_gen)

    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NoCandidateFound as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.counters:
            print(f"counters: {dict(exc.counters)}", file=sys.stderr)
        return EXIT_NO_CANDIDATE
    except FeasibilityAssertionError as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except TspnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
