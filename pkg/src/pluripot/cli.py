"""Command-line front end.

    pluripot eval     --set quarterpair --point 2,0,0,0
    pluripot grid     --set simplex --window -1,2,-1,2 --res 200 --out grid.csv
    pluripot bound    --set interval --point 2,0,0,0 --degrees 1,2,4,8
    pluripot approach --target pacman --linear-c 2 --out path.csv
    pluripot verify   --seed 1 --out report.json

Exit codes: 0 success, 1 failed verification, 2 invalid input, 3 domain
error, 4 unwritable output, 5 LP failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from pluripot.closed_forms import density_formula, extremal_function
from pluripot.lp import degree_sweep, lattice_for, lp_lower_bound
from pluripot.numerics import CSV_COLUMNS, ApproachPath, approach_experiment
from pluripot.sets import Kind, SetDescriptor, parse_kind
from pluripot.simplex import LPError
from pluripot.verify import ALL_CRITERIA, DEFAULT_FD_STEP, DEFAULT_SEED, report_json, run_verification

EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO, EXIT_LP = 1, 2, 3, 4, 5
MAX_RES = 2048


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def fmt(v: float) -> str:
    return f"{v:.17g}"


def write_atomic(path: str, text: str) -> None:
    """Write through a temporary file in the target directory and rename it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument parsing helpers
# ---------------------------------------------------------------------------

def parse_set(text: str) -> SetDescriptor:
    try:
        if text.lstrip().startswith("{"):
            return SetDescriptor.from_json(text)
        if os.path.isfile(text):
            with open(text) as fh:
                return SetDescriptor.from_json(fh.read())
        return SetDescriptor(parse_kind(text))
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_USAGE, f"invalid set descriptor {text!r}: {exc}") from exc


def parse_floats(text: str, count: int | tuple, what: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise CliError(EXIT_USAGE, f"{what} must be comma-separated numbers, got {text!r}") from exc
    counts = (count,) if isinstance(count, int) else count
    if len(vals) not in counts:
        raise CliError(EXIT_USAGE, f"{what} needs {' or '.join(map(str, counts))} numbers")
    if not all(math.isfinite(v) for v in vals):
        raise CliError(EXIT_USAGE, f"{what} must be finite")
    return vals


def parse_point(text: str) -> np.ndarray:
    """x1,y1,x2,y2 as a complex 2-vector."""
    x1, y1, x2, y2 = parse_floats(text, 4, "--point")
    return np.array([complex(x1, y1), complex(x2, y2)])


def parse_ints(text: str, what: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise CliError(EXIT_USAGE, f"{what} must be comma-separated integers") from exc


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_eval(args) -> int:
    desc = parse_set(args.set)
    z = parse_point(args.point)
    V = extremal_function(desc)
    if V is None:
        raise CliError(EXIT_DOMAIN, f"no closed form for {desc.kind.value}; use 'bound' for LP estimates")
    if desc.kind is Kind.INTERVAL:
        if z[1] != 0:
            raise CliError(EXIT_DOMAIN, "the interval lives in C; give x2 = y2 = 0")
        value = float(V(z[0]))
    else:
        value = float(V(z))
    out = {"set": desc.to_dict(), "point": [z[0].real, z[0].imag, z[1].real, z[1].imag],
           "value": value}
    if desc.kind in (Kind.REALDISK, Kind.SQUARE, Kind.QUARTERPAIR) and desc.is_identity \
            and not np.any(z.imag):
        try:
            out["density"] = density_formula(desc, z.real)
        except ValueError:
            out["density"] = None
    print(fmt(value), file=sys.stderr if args.out else sys.stdout)
    emit(json.dumps(out, sort_keys=True) + "\n", args.out)
    return 0


def cmd_grid(args) -> int:
    desc = parse_set(args.set)
    x0, x1, y0, y1 = parse_floats(args.window, 4, "--window")
    if not (x1 > x0 and y1 > y0):
        raise CliError(EXIT_USAGE, "--window needs xmin < xmax and ymin < ymax")
    res = parse_ints(args.res, "--res")
    nx, ny = (res[0], res[0]) if len(res) == 1 else res[:2]
    if not (1 <= nx <= MAX_RES and 1 <= ny <= MAX_RES) or len(res) > 2:
        raise CliError(EXIT_USAGE, f"--res must be one or two integers in 1..{MAX_RES}")
    if desc.kind is Kind.INTERVAL:
        raise CliError(EXIT_DOMAIN, "grids are over the real slice of C^2; the interval is one-dimensional")
    V = extremal_function(desc)
    if V is None:
        raise CliError(EXIT_DOMAIN, f"no closed form for {desc.kind.value}")
    xs = x0 + (np.arange(nx) + 0.5) * (x1 - x0) / nx
    ys = y0 + (np.arange(ny) + 0.5) * (y1 - y0) / ny

    def row(j):
        z = np.column_stack([xs, np.full(nx, ys[j])]).astype(complex)
        v = V(z)
        return "".join(f"{fmt(x)},{fmt(ys[j])},{fmt(float(val))}\n" for x, val in zip(xs, v))

    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        rows = list(pool.map(row, range(ny)))
    emit("x,y,value\n" + "".join(rows), args.out)
    return 0


def cmd_bound(args) -> int:
    desc = parse_set(args.set)
    vals = parse_floats(args.point, (1, 2, 4), "--point")
    if len(vals) == 4:
        if vals[1] or vals[3]:
            raise CliError(EXIT_DOMAIN, "LP bounds need a real point (y1 = y2 = 0)")
        vals = [vals[0], vals[2]]
    z0 = np.array(vals[: desc.dim])
    if desc.dim == 1 and len(vals) == 2 and vals[1] != 0:
        raise CliError(EXIT_DOMAIN, "the interval lives in C; give x2 = 0")
    try:
        lattice = lattice_for(desc, args.lattice)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(EXIT_USAGE, f"invalid lattice {args.lattice!r}: {exc}") from exc
    degrees = parse_ints(args.degrees, "--degrees") if args.degrees else [args.degree]
    try:
        if len(degrees) == 1:
            bounds = [lp_lower_bound(desc, lattice, degrees[0], z0)]
        else:
            bounds = degree_sweep(desc, lattice, z0, degrees)
    except LPError as exc:
        raise CliError(EXIT_LP, f"LP failed: {exc}") from exc
    except ValueError as exc:
        raise CliError(EXIT_DOMAIN, str(exc)) from exc
    V = extremal_function(desc) if lattice.dim == desc.dim and args.lattice in (None, "sigma") else None
    ref = None
    if V is not None:
        ref = float(V(complex(z0[0]))) if desc.dim == 1 else float(V(z0.astype(complex)))
    out = {"set": desc.to_dict(), "point": [float(v) for v in z0], "lattice": lattice.to_list(),
           "bounds": [b.to_dict() for b in bounds], "reference": ref}
    emit(json.dumps(out, sort_keys=True, indent=2) + "\n", args.out)
    return 0


def build_path(args) -> ApproachPath:
    chosen = [args.linear_c is not None, args.vertical, args.tangential is not None, args.m is not None]
    if sum(chosen) != 1:
        raise CliError(EXIT_USAGE, "choose exactly one of --linear-c, --vertical, --tangential, --m")
    kw = {"target": args.target, "mirror": args.mirror}
    if args.linear_c is not None:
        kw.update(kind="linear", c=args.linear_c)
    elif args.vertical:
        kw.update(kind="vertical")
    elif args.tangential is not None:
        a, N = parse_floats(args.tangential, 2, "--tangential")
        kw.update(kind="tangential", a=a, N=N)
    else:
        kw.update(kind="linearm", m=args.m)
    if args.samples is not None:
        kw["samples"] = args.samples
    try:
        return ApproachPath(**kw)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, f"invalid path: {exc}") from exc


def cmd_approach(args) -> int:
    path = build_path(args)
    try:
        res = approach_experiment(path)
    except ValueError as exc:
        raise CliError(EXIT_DOMAIN, str(exc)) from exc
    csv = ",".join(CSV_COLUMNS) + "\n" + "".join(
        f"{r[0]}," + ",".join(fmt(v) for v in r[1:]) + "\n" for r in res.rows)
    summary = json.dumps({"target": path.target.value, "path": path.label(),
                          "fit": res.fit.to_dict()}, sort_keys=True) + "\n"
    if args.out:
        write_atomic(args.out, csv)
        emit(summary, args.json_out)
    else:
        sys.stdout.write(csv)
        if args.json_out:
            write_atomic(args.json_out, summary)
        else:
            sys.stderr.write(summary)
    return 0


def cmd_verify(args) -> int:
    ids = parse_ints(args.criteria, "--criteria") if args.criteria else list(ALL_CRITERIA)
    if any(i not in ALL_CRITERIA for i in ids):
        raise CliError(EXIT_USAGE, f"criteria must be among {list(ALL_CRITERIA)}")
    if not (args.fd_step > 0 and math.isfinite(args.fd_step)):
        raise CliError(EXIT_USAGE, "--fd-step must be positive")
    report = run_verification(seed=args.seed, fd_step=args.fd_step, criteria=ids,
                              threads=max(1, args.threads))
    emit(report_json(report), args.out)
    for c in report["criteria"]:
        print(f"criterion {c['id']:2d}: {'pass' if c['passed'] else 'FAIL'}  {c['title']}",
              file=sys.stderr)
    if report["failed"]:
        print("failed criteria: " + ", ".join(map(str, report["failed"])), file=sys.stderr)
        return EXIT_FAIL
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pluripot", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="output file (written atomically); stdout if omitted")
        sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    e = sub.add_parser("eval", help="closed-form extremal function at a point of C^2")
    e.add_argument("--set", required=True, help="set name or JSON descriptor")
    e.add_argument("--point", required=True, help="x1,y1,x2,y2")
    common(e)
    e.set_defaults(func=cmd_eval)

    g = sub.add_parser("grid", help="values on the real slice as CSV x,y,value")
    g.add_argument("--set", required=True)
    g.add_argument("--window", required=True, help="xmin,xmax,ymin,ymax")
    g.add_argument("--res", default="200", help="n or nx,ny (cell centres, at most 2048)")
    common(g)
    g.set_defaults(func=cmd_grid)

    b = sub.add_parser("bound", help="LP lower bounds from polynomials bounded on a mesh")
    b.add_argument("--set", required=True)
    b.add_argument("--point", required=True, help="x1,y1,x2,y2 (real: y1 = y2 = 0) or x1,x2")
    b.add_argument("--degree", type=int, default=8)
    b.add_argument("--degrees", help="comma-separated increasing degrees (overrides --degree)")
    b.add_argument("--lattice", default=None,
                   help="sigma (default), c for co{(0,0),(2,0),(0,1)}, or vertices 'a,b;c,d;...'")
    common(b)
    b.set_defaults(func=cmd_bound)

    a = sub.add_parser("approach", help="density along a path into a corner")
    a.add_argument("--target", choices=["pacman", "scorner"], default="pacman")
    a.add_argument("--linear-c", type=float)
    a.add_argument("--vertical", action="store_true")
    a.add_argument("--tangential", help="a,N for the path y = (x-1) + a (x-1)^N")
    a.add_argument("--m", type=float, help="slope of the line x2 = m x1 into the corner of S")
    a.add_argument("--mirror", action="store_true", help="reflect the path")
    a.add_argument("--samples", type=int)
    a.add_argument("--json-out", help="file for the fitted limit (JSON)")
    a.add_argument("--seed", type=int, default=DEFAULT_SEED, help="accepted for uniformity; paths are deterministic")
    common(a)
    a.set_defaults(func=cmd_approach)

    v = sub.add_parser("verify", help="run the acceptance suite and write a JSON report")
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--fd-step", type=float, default=DEFAULT_FD_STEP)
    v.add_argument("--criteria", help="comma-separated subset of 1..12")
    common(v)
    v.set_defaults(func=cmd_verify)
    return p


_LIST_OPTIONS = ("--point", "--window", "--tangential", "--linear-c", "--m")


def _glue_negative(argv: list[str]) -> list[str]:
    """Turn '--window -1,1,-1,1' into '--window=-1,1,-1,1' so argparse accepts it."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _LIST_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative(argv))
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
