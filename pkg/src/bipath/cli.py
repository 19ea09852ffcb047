"""Command line interface.

Exit codes: 0 on success, 1 on invalid input, 2 when the two decomposition
methods (or the built-in self test) disagree.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from importlib.resources import files
from pathlib import Path
from typing import Optional, Sequence

from . import diagram as dg
from .direct import decompose_direct
from .ff import FieldSpec
from .filtration import (
    FiltrationError,
    bipath_pd,
    format_filtration,
    parse_embedding,
    parse_filtration,
    parse_grid,
    restrict_grid,
)
from .matrix_method import decompose_bipath
from .module import ModuleValidationError, loads, random_instances
from .poset import parse_interval

EXIT_OK, EXIT_INVALID, EXIT_DISAGREE = 0, 1, 2


class CliError(Exception):
    def __init__(self, msg: str, code: int = EXIT_INVALID):
        super().__init__(msg)
        self.code = code


def seed_from_env(default: int = 0) -> int:
    raw = os.environ.get("BIPATH_SEED")
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise CliError(f"BIPATH_SEED must be an integer, got {raw!r}") from exc


def fixture_text(name: str = "sec5.bft") -> str:
    return files("bipath").joinpath("data", name).read_text()


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc


def _write(data: bytes, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    try:
        Path(out).write_bytes(data)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}") from exc


def _format(args: argparse.Namespace) -> str:
    if args.format:
        return args.format
    if args.out and args.out != "-":
        suffix = Path(args.out).suffix.lstrip(".").lower()
        if suffix in ("json", "csv", "svg"):
            return suffix
    return "json"


# --- subcommands -----------------------------------------------------------


def cmd_pd(args: argparse.Namespace) -> int:
    f = parse_filtration(_read(args.input))
    fmt = _format(args)
    if args.degree == "all":
        if fmt != "json":
            raise CliError("--degree all supports only JSON output; pick one degree for csv/svg")
        degrees = list(range(0, max(f.max_dim(), 0) + 1))
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda q: bipath_pd(f, q, args.field), degrees))
        diagrams = [dg.BipathDiagram(f.shape, r, q) for q, r in zip(degrees, results)]
        payload = {
            "shape": [f.shape.n, f.shape.m],
            "field": args.field,
            "diagrams": [dg.to_json_dict(d) for d in diagrams],
        }
        _write((json.dumps(payload, sort_keys=True, ensure_ascii=False) + "\n").encode(), args.out)
        return EXIT_OK
    try:
        q = int(args.degree)
    except ValueError as exc:
        raise CliError(f"--degree must be an integer or 'all', got {args.degree!r}") from exc
    if q < 0:
        raise CliError("--degree must be non-negative")
    d = dg.BipathDiagram(f.shape, bipath_pd(f, q, args.field), q)
    _write(dg.emit(d, fmt), args.out)
    return EXIT_OK


def cmd_decompose(args: argparse.Namespace) -> int:
    v = loads(_read(args.input))
    results = {}
    if args.method in ("matrix", "both"):
        results["matrix"] = decompose_bipath(v)
    if args.method in ("direct", "both"):
        results["direct"] = decompose_direct(v)
    if args.method == "both" and results["matrix"] != results["direct"]:
        only_m = results["matrix"] - results["direct"]
        only_d = results["direct"] - results["matrix"]
        render = lambda c: sorted(iv.render(v.shape) for iv in c.elements())  # noqa: E731
        raise CliError(
            f"methods disagree: matrix only {render(only_m)}, direct only {render(only_d)}", EXIT_DISAGREE
        )
    d = dg.BipathDiagram(v.shape, next(iter(results.values())))
    _write(dg.emit(d, _format(args)), args.out)
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    d = dg.from_json(_read(args.input))
    _write(dg.to_svg(d).encode(), args.out)
    return EXIT_OK


def cmd_restrict(args: argparse.Namespace) -> int:
    grid = parse_grid(_read(args.grid))
    shape, emb = parse_embedding(_read(args.embedding))
    f = restrict_grid(grid, emb, shape)
    _write(format_filtration(f).encode(), args.out)
    return EXIT_OK


EXPECTED = {
    0: ["B", "L<0,0>", "L<l1,0>"],
    1: ["R<u1,l1>", "R<u1,l2>", "R<u2,1>", "U<u3,u3>", "D<l1,l1>"],
}


def cmd_selftest(args: argparse.Namespace) -> int:
    f = parse_filtration(fixture_text())
    ok = True
    for q in range(0, 4):
        want = Counter(parse_interval(t, f.shape) for t in EXPECTED.get(q, []))
        got = bipath_pd(f, q, 2)
        status = "ok" if got == want else "FAIL"
        ok &= got == want
        print(f"worked example, degree {q}: {status} {sorted(iv.render(f.shape) for iv in got.elements())}")
    seed = seed_from_env(args.seed)
    bad = 0
    for inst in random_instances(args.count, seed=seed, max_shape=(4, 4), max_summands=10):
        m, d = decompose_bipath(inst.module), decompose_direct(inst.module)
        if not (m == d == inst.truth):
            bad += 1
            print(f"scrambled instance seed={inst.seed}: FAIL", file=sys.stderr)
    print(f"scrambled round trips (seed {seed}): {args.count - bad}/{args.count} ok")
    ok &= bad == 0
    return EXIT_OK if ok else EXIT_DISAGREE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bipath", description="Diagrams and interval decompositions over bipath posets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pd", help="persistence diagram of a bipath filtration")
    p.add_argument("--input", required=True, help="filtration file (.bft), or - for stdin")
    p.add_argument("--degree", default="all", help="homology degree or 'all' (default)")
    p.add_argument("--field", type=int, default=2, help="prime characteristic (default 2)")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("json", "csv", "svg"))
    p.set_defaults(func=cmd_pd)

    p = sub.add_parser("decompose", help="interval decomposition of a module given as JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=("matrix", "direct", "both"), default="matrix")
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv", "svg"))
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("plot", help="render a diagram JSON file as SVG")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("restrict", help="restrict a grid filtration along an embedded bipath")
    p.add_argument("--grid", required=True)
    p.add_argument("--embedding", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_restrict)

    p = sub.add_parser("selftest", help="run the bundled worked example and a seeded round trip")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if hasattr(args, "field"):
            FieldSpec(args.field)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (FiltrationError, ModuleValidationError, dg.DiagramError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
