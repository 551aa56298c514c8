"""
Command-line frontend.

Subcommands: ``describe``, ``check``, ``project``, ``energy`` and
``simulate``.  Exit status is 0 on success, 2 for invalid specs or options,
3 for numeric failures (partial artifacts are still written).
"""
from __future__ import annotations

import argparse
import io as _io
import math
import sys

import numpy as np

from . import __version__
from .calculus import NotProjectableError, project_triplet
from .diagnostics import DecideOptions, decide_H
from .energy import EnergyReport, QuadSpec, energy_limit, one_energy
from .exponent import write_psi_grid_csv
from .io import SpecErrors, dumps, load_spec, serialize, write_atomic
from .linalg import DEFAULT_RANK_THRESHOLD, spectral_decompose
from .measure import Atoms
from .pathsim import Hyperplane, PointTube, SimPlan, SubspaceTube, hitting_estimate, simulate_paths
from .quadrature import QuadratureError
from .triplet import ProcessSpec

EXIT_OK, EXIT_SPEC, EXIT_NUMERIC = 0, 2, 3


class OptionError(ValueError):
    pass


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise OptionError(f"expected comma-separated numbers, got {text!r}") from None


def _vectors(text: str) -> np.ndarray:
    rows = [_floats(v) for v in text.split(";") if v.strip()]
    if not rows or len({len(r) for r in rows}) != 1:
        raise OptionError(f"expected ';'-separated vectors of equal length, got {text!r}")
    return np.array(rows)


def parse_atoms(text: str, dim: int) -> Atoms:
    """``"x1,x2:w;..."``; the weight defaults to 1."""
    locs, ws = [], []
    for item in text.split(";"):
        if not item.strip():
            continue
        loc, _, w = item.partition(":")
        x = _floats(loc)
        if len(x) != dim:
            raise OptionError(f"atom {item!r} has {len(x)} coordinates, spec has dim {dim}")
        locs.append(x)
        ws.append(float(w) if w.strip() else 1.0)
    if not locs:
        raise OptionError("no atoms given")
    if any(w < 0 or not math.isfinite(w) for w in ws):
        raise OptionError("atom weights must be finite and nonnegative")
    return Atoms(locs, ws)


def parse_target(text: str, dim: int):
    """``hyperplane:n:offset``, ``point:x:eps`` or ``subspace:v1;v2:eps``."""
    kind, _, rest = text.partition(":")
    body, _, last = rest.rpartition(":")
    if not body:
        raise OptionError(f"cannot parse target {text!r}")
    try:
        val = float(last)
    except ValueError:
        raise OptionError(f"cannot parse target {text!r}") from None
    if kind == "hyperplane":
        n = _floats(body)
        if len(n) != dim or not any(n):
            raise OptionError("hyperplane normal must be a nonzero vector of the spec dimension")
        return Hyperplane(tuple(n), val)
    if val <= 0:
        raise OptionError("tube radius must be positive")
    if kind == "point":
        x = _floats(body)
        if len(x) != dim:
            raise OptionError("point has the wrong dimension")
        return PointTube(tuple(x), val)
    if kind == "subspace":
        B = _vectors(body)
        if B.shape[1] != dim:
            raise OptionError("subspace vectors have the wrong dimension")
        return SubspaceTube(tuple(map(tuple, B)), val)
    raise OptionError(f"unknown target kind {kind!r}")


def _emit(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        write_atomic(path, text)


def _with_suffix(path, suffix: str):
    if path in (None, "-"):
        return None
    stem = path[: path.rfind(".")] if "." in path.rsplit("/", 1)[-1] else path
    return stem + suffix


# ------------------------------------------------------------------ commands


def cmd_describe(spec: ProcessSpec, args) -> int:
    t = spec.triplet
    z = np.linspace(-args.zmax, args.zmax, args.points)
    Z = np.vstack([np.outer(z, e) for e in np.eye(t.dim)])
    buf = _io.StringIO()
    write_psi_grid_csv(t, Z, buf)
    _emit(args.output, buf.getvalue())
    s = spectral_decompose(t.Q, args.rank_threshold)
    print(f"dim={t.dim} rank(Q)={s.rank} jump_mass={t.mu.total_mass():.6g} components={len(t.mu)}", file=sys.stderr)
    return EXIT_OK


def cmd_check(spec: ProcessSpec, args) -> int:
    v = decide_H(spec, DecideOptions(rank_threshold=args.rank_threshold, numeric_rules=not args.exact_only))
    _emit(args.output, dumps(v.to_dict()))
    md = args.summary or _with_suffix(args.output, ".md")
    if md:
        write_atomic(md, v.summary_markdown())
    print(f"(H) {v.status}", file=sys.stderr)
    return EXIT_OK


def cmd_project(spec: ProcessSpec, args) -> int:
    V = _vectors(args.subspace).T
    try:
        pr = project_triplet(spec.triplet, V)
    except NotProjectableError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as e:
        raise OptionError(str(e)) from None
    _emit(args.output, serialize(ProcessSpec(pr.projected_triplet)))
    return EXIT_OK


def cmd_energy(spec: ProcessSpec, args) -> int:
    t = spec.triplet
    nu = parse_atoms(args.atoms, t.dim)
    ladder = _floats(args.lambda_ladder) if args.lambda_ladder else None
    qs = QuadSpec(rmax=args.rmax, n_angles=args.angles)
    status = EXIT_OK
    try:
        rep = energy_limit(t, nu, ladder, qs, workers=args.workers)
    except QuadratureError as e:
        one = one_energy(t, nu, qs)
        rep = EnergyReport(ladder or [], [], one, math.nan, "inconclusive", math.nan, [str(e)])
        status = EXIT_NUMERIC
    _emit(args.output, dumps(rep.to_dict()))
    csv_path = args.csv or _with_suffix(args.output, ".csv")
    if csv_path:
        buf = _io.StringIO()
        rep.write_csv(buf)
        write_atomic(csv_path, buf.getvalue())
    if any(math.isnan(v) for v in rep.values):
        status = EXIT_NUMERIC
    return status


def cmd_simulate(spec: ProcessSpec, args) -> int:
    t = spec.triplet
    target = parse_target(args.target, t.dim)
    window = _floats(args.window) if args.window else None
    if window is not None and len(window) != 2:
        raise OptionError("window takes two times")
    try:
        plan = SimPlan(args.horizon, args.steps, args.cutoff, args.paths, args.seed)
    except ValueError as e:
        raise OptionError(str(e)) from None
    try:
        ens = simulate_paths(t, plan)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    est = hitting_estimate(ens, target, window)
    _emit(args.output, dumps(est.to_dict()))
    if args.ensemble:
        ens.save_npz(args.ensemble)
    if args.paths_csv:
        write_atomic(args.paths_csv, ens.summary_csv())
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="levyhunt", description=__doc__.strip().splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--input", "-i", required=True, help="process-spec JSON file")
        sp.add_argument("--output", "-o", default="-", help="output file ('-' for stdout)")
        sp.add_argument("--rank-threshold", type=float, default=DEFAULT_RANK_THRESHOLD)
        return sp

    d = common(sub.add_parser("describe", help="exponent grid CSV along the coordinate axes"))
    d.add_argument("--zmax", type=float, default=10.0)
    d.add_argument("--points", type=int, default=41)

    c = common(sub.add_parser("check", help="decide (H) and write the verdict with its rule trace"))
    c.add_argument("--summary", help="markdown summary path (default: output with .md)")
    c.add_argument("--exact-only", action="store_true", help="skip the numeric sufficient criteria")

    pr = common(sub.add_parser("project", help="project onto a subspace and write the projected spec"))
    pr.add_argument("--subspace", required=True, help="orthonormal basis vectors 'v1;v2', comma-separated coordinates")

    e = common(sub.add_parser("energy", help="lambda-energy ladder for an atomic test measure"))
    e.add_argument("--atoms", default=None, help="'x1,x2:w;...' (default: unit atom at the origin)")
    e.add_argument("--lambda-ladder", default=None, help="comma-separated increasing lambdas (default 4^k, k=0..8)")
    e.add_argument("--csv", help="ladder CSV path (default: output with .csv)")
    e.add_argument("--rmax", type=float, default=1e8)
    e.add_argument("--angles", type=int, default=64)
    e.add_argument("--workers", type=int, default=1)

    s = common(sub.add_parser("simulate", help="Monte Carlo hitting estimate"))
    s.add_argument("--target", required=True, help="hyperplane:n:offset | point:x:eps | subspace:v1;v2:eps")
    s.add_argument("--window", help="t1,t2 (default: whole horizon)")
    s.add_argument("--paths", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--steps", type=int, default=100)
    s.add_argument("--horizon", type=float, default=1.0)
    s.add_argument("--cutoff", type=float, default=0.1, help="small-jump cutoff in (0, 1]")
    s.add_argument("--ensemble", help="write the ensemble as .npz")
    s.add_argument("--paths-csv", help="write per-path summary CSV")
    return p


COMMANDS = {
    "describe": cmd_describe,
    "check": cmd_check,
    "project": cmd_project,
    "energy": cmd_energy,
    "simulate": cmd_simulate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_spec(args.input)
    except SpecErrors as e:
        for err in e.errors:
            print(f"{args.input}: {err}", file=sys.stderr)
        return EXIT_SPEC
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SPEC
    if args.command == "energy" and args.atoms is None:
        args.atoms = ",".join(["0"] * spec.triplet.dim)
    try:
        return COMMANDS[args.command](spec, args)
    except OptionError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SPEC
    except (QuadratureError, FloatingPointError) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
