"""Command-line front end: sketch construction, distances, inspection, benchmarks.

Exit codes: 0 success, 1 usage, 2 I/O failure, 3 invalid input or
unreachable precision.  All commands are deterministic given files, flags,
and seed.  Batch distance mode evaluates pairs concurrently (capped by the
PDSKETCH_THREADS environment variable) but prints results in input order.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import generators
from .diagram import Diagram, parse_diagram
from .errors import PDSketchError
from .greedy import build_sketch
from .matching import exact_bottleneck
from .neighbors import approx_bottleneck, approx_hausdorff
from .oracle import brute_hausdorff
from .sketch import Sketch, from_greedy, read_sketch, write_sketch

USAGE_EXIT, IO_EXIT, VALIDATION_EXIT = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _load(path: str) -> tuple[str, object]:
    """Read a diagram or sketch file, sniffing the sketch header."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if text.startswith("pdsketch v1"):
        return "sketch", read_sketch(text)
    return "diagram", parse_diagram(text)


def _as_sketch(kind: str, obj, *, precision: float | None = None) -> Sketch:
    if kind == "sketch":
        return obj
    result = build_sketch(obj, precision=precision)
    return from_greedy(result, obj)


def _as_diagram(kind: str, obj) -> Diagram:
    if kind == "diagram":
        return obj
    return obj.reconstruct(obj.size)


def _cmd_sketch(args) -> int:
    kind, obj = _load(args.input)
    if kind != "diagram":
        raise PDSketchError(f"{args.input} is already a sketch")
    result = build_sketch(obj, max_points=args.size, precision=args.precision)
    sketch = from_greedy(result, obj)
    with open(args.output, "w", encoding="utf-8") as fh:
        write_sketch(sketch, fh)
    print(f"n={sketch.size} eps0={sketch.radii[0]:g} entries={sketch.entry_count()}")
    return 0


def _format_result(args, payload: dict) -> str:
    if args.json:
        return json.dumps(payload)
    if payload.get("lower") is not None and payload["lower"] != payload["value"]:
        return f"{payload['value']:g} [{payload['lower']:g}, {payload['upper']:g}]"
    return f"{payload['value']:g}"


def _dist_one(args, path_a: str, path_b: str) -> dict:
    ka, a = _load(path_a)
    kb, b = _load(path_b)
    if args.kind == "hausdorff":
        if args.exact:
            da, db = _as_diagram(ka, a), _as_diagram(kb, b)
            value = brute_hausdorff(list(da.points), list(db.points))
            payload = dict(value=value, lower=value, upper=value, eps_used=None,
                           n_left=len(da), n_right=len(db))
        else:
            sa, sb = _as_sketch(ka, a), _as_sketch(kb, b)
            lower, upper, value = approx_hausdorff(sa, sb, args.gamma)
            payload = dict(value=value, lower=lower, upper=upper, eps_used=None,
                           n_left=sa.size, n_right=sb.size)
        return payload
    if args.eps is not None and not args.exact:
        sa = _as_sketch(ka, a, precision=args.eps / 2.0)
        sb = _as_sketch(kb, b, precision=args.eps / 2.0)
        value, _ = approx_bottleneck(sa, sb, args.eps, args.gamma)
        return dict(value=value, lower=max(0.0, value - args.eps), upper=value + args.eps,
                    eps_used=args.eps, n_left=sa.size, n_right=sb.size)
    da, db = _as_diagram(ka, a), _as_diagram(kb, b)
    value, _ = exact_bottleneck(da, db)
    return dict(value=value, lower=value, upper=value, eps_used=0.0,
                n_left=len(da), n_right=len(db))


def _cmd_dist(args) -> int:
    if args.pairs:
        with open(args.pairs, "r", encoding="utf-8") as fh:
            rows = [line.split() for line in fh if line.strip()]
        for row in rows:
            if len(row) != 2:
                raise PDSketchError(f"pairs file line needs two paths, got {row}")
        workers = max(1, int(os.environ.get("PDSKETCH_THREADS", "4")))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda r: _dist_one(args, r[0], r[1]), rows))
        for payload in results:
            print(_format_result(args, payload))
        return 0
    if not (args.a and args.b):
        raise PDSketchError("dist needs two input paths (or --pairs FILE)")
    print(_format_result(args, _dist_one(args, args.a, args.b)))
    return 0


def _cmd_info(args) -> int:
    kind, obj = _load(args.sketch)
    if kind != "sketch":
        raise PDSketchError(f"{args.sketch} is not a sketch file")
    if obj.size == 0:
        print("n=0")
        return 0
    eps = ",".join(f"{r:g}" for r in obj.radii)
    print(f"n={obj.size} eps=[{eps}] entries={obj.entry_count()} max_fanin={obj.max_fanin()}")
    return 0


def _cmd_bench(args) -> int:
    print("n\tspread\ttouches\tseconds")
    for n in args.n:
        if n == 0:
            continue
        diagram = generators.make_diagram(args.family, n, args.seed)
        start = time.perf_counter()
        result = build_sketch(
            diagram, naive_diagonal=(args.variant == "naive"), kernels=args.impl
        )
        elapsed = time.perf_counter() - start
        sketch = from_greedy(result, diagram)
        print(f"{n}\t{generators.spread(sketch):.6g}\t{result.stats.touches}\t{elapsed:.6f}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="pdsketch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sketch", help="build a sketch from a diagram file")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    stop = p.add_mutually_exclusive_group()
    stop.add_argument("--precision", type=float, help="stop once the error is at or below this")
    stop.add_argument("--size", type=int, help="stop after this many points")
    p.set_defaults(func=_cmd_sketch)

    p = sub.add_parser("dist", help="distance between two diagrams or sketches")
    p.add_argument("kind", choices=("bottleneck", "hausdorff"))
    p.add_argument("a", nargs="?")
    p.add_argument("b", nargs="?")
    p.add_argument("--exact", action="store_true", help="exact computation, no sketching")
    p.add_argument("--eps", type=float, help="additive error budget (bottleneck)")
    p.add_argument("--gamma", type=float, default=4.0, help="approximation parameter (default 4)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--pairs", help="file of path pairs, one per line")
    p.set_defaults(func=_cmd_dist)

    p = sub.add_parser("info", help="inspect a sketch file")
    p.add_argument("sketch")
    p.set_defaults(func=_cmd_info)

    p = sub.add_parser("bench", help="sketch-construction benchmark rows")
    p.add_argument("--family", choices=generators.FAMILIES, default="uniform")
    p.add_argument("--n", type=int, action="append", required=True,
                   help="input size; repeat for multiple rows")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=("modified", "naive"), default="modified")
    p.add_argument("--impl", choices=("auto", "c", "py"), default="auto",
                   help="kernel implementation")
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"pdsketch: {exc}", file=sys.stderr)
        return IO_EXIT
    except PDSketchError as exc:
        print(f"pdsketch: {exc}", file=sys.stderr)
        return VALIDATION_EXIT


if __name__ == "__main__":
    sys.exit(main())
