"""Command-line front end: verification reports, branch trajectories, meshes.

Subcommands
-----------
verify      run named verification suites at one parameter pair, JSON report
integrate   march the rotational branch ODE, CSV trajectory
mesh        export a surface as a Wavefront OBJ with a residual header

Exit codes: 0 success / all suites pass, 1 suites ran but failed, 2 usage or
input error, 3 numeric domain failure.  Outputs are UTF-8 with LF endings
and fixed 17-significant-digit float formatting, so identical flags and
seeds reproduce byte-identical files (wall-clock timing is only included on
request, to keep the default report deterministic).
"""

from __future__ import annotations

import argparse
import math
import sys
import time

import numpy as np

from . import __version__, biconservative as bic, rotation as rot
from .ambient import BcvParams, norm
from .errors import BcvError, DomainError
from .suites import SUITE_NAMES, run_report, worker_count

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _json_dumps(obj, indent: int = 0) -> str:
    """Minimal JSON writer with deterministic float formatting."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  "{k}": {_json_dumps(v, indent + 1)}' for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {_json_dumps(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, float):
        return _fmt(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _write_text(path, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _add_params(parser: argparse.ArgumentParser):
    parser.add_argument("--kappa", type=float, required=True,
                        help="base curvature of the ambient family")
    parser.add_argument("--tau", type=float, required=True,
                        help="bundle curvature of the ambient family")


def _params_from(args, parser) -> BcvParams:
    if not (math.isfinite(args.kappa) and math.isfinite(args.tau)):
        parser.error("kappa and tau must be finite")
    return BcvParams(args.kappa, args.tau)


# ---------------------------------------------------------------------------
# verify


def _cmd_verify(args, parser) -> int:
    params = _params_from(args, parser)
    names = args.suite if args.suite else list(SUITE_NAMES)
    started = time.perf_counter()
    report = run_report(params, names, seed=args.seed, threads=args.threads)
    if args.timing:
        report["wall_time_s"] = time.perf_counter() - started
    _write_text(args.out, _json_dumps(report) + "\n")
    return EXIT_OK if report["pass"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# integrate


def _cmd_integrate(args, parser) -> int:
    params = _params_from(args, parser)
    if not args.r0 > rot.EPS_R:
        parser.error(f"--r0 must exceed {rot.EPS_R}")
    if args.step <= 0 or args.smax <= 0 or args.max_steps < 1:
        parser.error("--step and --smax must be positive, --max-steps >= 1")
    try:
        init = rot.ProfileState(s=0.0, r=args.r0, z=0.0, sigma=args.sigma0)
        cfg = rot.IntegrationConfig(step=args.step, s_max=args.smax,
                                    max_steps=args.max_steps)
        traj = rot.integrate_noncmc_branch(params, init, cfg)
    except DomainError as exc:
        parser.error(str(exc))
    lines = ["s,r,z,sigma,f,R1,R2,obstruction"]
    keep = [0, 1, 2, 3, 4, 6, 7, 8]  # drop the internal f' column
    for row in traj.data:
        lines.append(",".join(_fmt(float(row[i])) for i in keep))
    lines.append(f"# status: {traj.status}")
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# mesh


def _read_csv_columns(path, required, parser):
    try:
        data = np.genfromtxt(path, delimiter=",", names=True, comments="#")
    except OSError as exc:
        parser.error(f"cannot read {path}: {exc}")
    names = data.dtype.names or ()
    missing = [c for c in required if c not in names]
    if missing:
        parser.error(f"{path}: missing columns {', '.join(missing)}")
    if data.shape == ():
        data = data.reshape(1)
    if data.shape[0] < 4:
        parser.error(f"{path}: need at least 4 rows for a spline profile")
    return data


def _mesh_surface(args, parser):
    params = _params_from(args, parser)
    if args.kind == "hopf-cylinder":
        if args.r0 is None or not args.r0 > rot.EPS_R:
            parser.error("--r0 must be given and positive for hopf-cylinder")
        spec = f"hopf-cylinder r0 {_fmt(args.r0)}"
        return params, rot.hopf_cylinder(params, args.r0), spec
    if args.kind == "revolution":
        if args.profile is None:
            parser.error("--profile FILE.csv is required for revolution")
        data = _read_csv_columns(args.profile, ("s", "r", "z", "sigma"), parser)
        from scipy.interpolate import CubicSpline

        s = np.asarray(data["s"], dtype=float)
        if not np.all(np.diff(s) > 0):
            parser.error(f"{args.profile}: s column must be strictly increasing")
        r_sp = CubicSpline(s, np.asarray(data["r"], dtype=float))
        z_sp = CubicSpline(s, np.asarray(data["z"], dtype=float))
        g_sp = CubicSpline(s, np.asarray(data["sigma"], dtype=float))

        def profile(ss):
            return rot.ProfileState(s=ss, r=float(r_sp(ss)), z=float(z_sp(ss)),
                                    sigma=float(g_sp(ss)))

        surface = rot.revolution_surface(params, profile,
                                         (float(s[0]), float(s[-1])))
        return params, surface, f"revolution profile {args.profile}"
    if args.kind == "hopf-tube":
        if args.base is None:
            parser.error("--base FILE.csv is required for hopf-tube")
        data = _read_csv_columns(args.base, ("x", "y"), parser)
        from scipy.interpolate import CubicSpline

        xs = np.asarray(data["x"], dtype=float)
        ys = np.asarray(data["y"], dtype=float)
        ts = np.linspace(0.0, 1.0, len(xs))
        closed = abs(xs[0] - xs[-1]) < 1e-12 and abs(ys[0] - ys[-1]) < 1e-12
        bc = "periodic" if closed else "not-a-knot"
        x_sp = CubicSpline(ts, xs, bc_type=bc)
        y_sp = CubicSpline(ts, ys, bc_type=bc)

        def curve(u):
            return (float(x_sp(u)), float(y_sp(u)))

        def d_curve(u):
            return (float(x_sp(u, 1)), float(y_sp(u, 1)))

        surface = rot.hopf_tube(params, curve, d_curve, u_domain=(0.0, 1.0))
        return params, surface, f"hopf-tube base {args.base}"
    parser.error(f"unknown mesh kind {args.kind!r}")


def _cmd_mesh(args, parser) -> int:
    if args.nu < 2 or args.nv < 2:
        parser.error("--nu and --nv must be at least 2")
    params, surface, spec = _mesh_surface(args, parser)
    us, vs = surface.grid(args.nu, args.nv)
    verts = []
    max_tb = 0.0
    try:
        for u in us:
            for v in vs:
                p = surface.point(params, float(u), float(v))
                tb = bic.tangential_bitension(surface, params, float(u), float(v))
                max_tb = max(max_tb, norm(params, tb))
                verts.append((p.x, p.y, p.z))
    except BcvError as exc:
        print(f"mesh aborted, no output written: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    lines = [
        f"# bcvgeo {__version__} mesh {spec}",
        f"# kappa {_fmt(params.kappa)} tau {_fmt(params.tau)} nu {args.nu} nv {args.nv}",
        f"# max_tangential_bitension {_fmt(max_tb)}",
    ]
    for x, y, z in verts:
        lines.append(f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}")
    for i in range(args.nu - 1):
        for j in range(args.nv - 1):
            a = i * args.nv + j + 1
            b = (i + 1) * args.nv + j + 1
            lines.append(f"f {a} {b} {b + 1} {a + 1}")
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bcvgeo",
        description="Verification tooling for surfaces in the "
                    "Bianchi-Cartan-Vranceanu 3-spaces.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run verification suites")
    _add_params(p_verify)
    p_verify.add_argument("--suite", action="append", choices=SUITE_NAMES,
                          help="suite to run (repeatable; default: all)")
    p_verify.add_argument("--seed", type=int, default=42,
                          help="seed for the suite sampling (default 42)")
    p_verify.add_argument("--threads", type=int, default=None,
                          help="worker cap (default: BCV_THREADS or 1)")
    p_verify.add_argument("--timing", action="store_true",
                          help="include wall time in the report "
                               "(breaks byte-for-byte reproducibility)")
    p_verify.add_argument("--out", default=None, help="output file (default stdout)")
    p_verify.set_defaults(fn=_cmd_verify)

    p_int = sub.add_parser("integrate", help="integrate the rotational branch")
    _add_params(p_int)
    p_int.add_argument("--r0", type=float, required=True, help="initial radius")
    p_int.add_argument("--sigma0", type=float, required=True,
                       help="initial profile angle (radians)")
    p_int.add_argument("--step", type=float, default=1e-3, help="RK4 step (default 1e-3)")
    p_int.add_argument("--smax", type=float, default=5.0,
                       help="arclength horizon (default 5)")
    p_int.add_argument("--max-steps", type=int, default=20000,
                       help="row budget (default 20000)")
    p_int.add_argument("--out", default=None, help="output file (default stdout)")
    p_int.set_defaults(fn=_cmd_integrate)

    p_mesh = sub.add_parser("mesh", help="export a surface mesh as OBJ")
    p_mesh.add_argument("kind", choices=("hopf-cylinder", "revolution", "hopf-tube"))
    _add_params(p_mesh)
    p_mesh.add_argument("--r0", type=float, default=None, help="cylinder radius")
    p_mesh.add_argument("--profile", default=None,
                        help="profile CSV with columns s,r,z,sigma")
    p_mesh.add_argument("--base", default=None,
                        help="base-curve CSV with columns x,y")
    p_mesh.add_argument("--nu", type=int, default=16, help="grid size in u (default 16)")
    p_mesh.add_argument("--nv", type=int, default=16, help="grid size in v (default 16)")
    p_mesh.add_argument("--out", default=None, help="output file (default stdout)")
    p_mesh.set_defaults(fn=_cmd_mesh)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "fn", None) is _cmd_verify and args.threads is None:
        args.threads = worker_count()
    try:
        return args.fn(args, parser)
    except DomainError as exc:
        print(f"numeric domain failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BcvError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
