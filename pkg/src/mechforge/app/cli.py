"""``mechforge`` command-line interface: run, validate, mesh-gen."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .. import __version__
from ..config import load_config, validate_against_mesh
from ..errors import (ConfigError, EvalError, MaterialError, MechforgeError, MeshError,
                      SolverError)
from ..formulation import build_mesh, build_problem
from ..mesh import (EllipsoidSpec, generate_ellipsoid, helix_fibers, unit_cube, unit_square,
                    write_fiber_file, write_gmsh)
from ..solver import NewtonSettings, full_solve
from .vtk import OutputSeries

log = logging.getLogger("mechforge")

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3
LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging():
    name = os.environ.get("MECHFORGE_LOG", "error").strip().lower()
    level = LOG_LEVELS.get(name)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("mechforge")
    root.handlers[:] = [handler]
    root.setLevel(level if level is not None else logging.ERROR)
    root.propagate = False
    if level is None:
        root.error("MECHFORGE_LOG=%r not one of %s; using 'error'", name, sorted(LOG_LEVELS))


def _report(exc):
    print(f"{type(exc).__name__}: {exc}", file=sys.stderr)


def _exit_code(exc):
    if isinstance(exc, (ConfigError, EvalError)):
        return EXIT_CONFIG
    if isinstance(exc, (SolverError, MaterialError)):
        return EXIT_SOLVER
    return EXIT_IO


def _point(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X,Y,Z, got {text!r}") from None
    if len(vals) not in (2, 3):
        raise argparse.ArgumentTypeError(f"expected X,Y,Z, got {text!r}")
    return vals


def _pair(text):
    vals = _point(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected SHORT,LONG, got {text!r}")
    return vals


# -- commands ---------------------------------------------------------------------


def cmd_validate(args):
    cfg = load_config(args.config)
    mesh, _ = build_mesh(cfg)
    validate_against_mesh(cfg, mesh.markers, mesh.dim)
    print(f"OK: {cfg.summary()}")
    return EXIT_OK


def cmd_run(args):
    cfg = load_config(args.config)
    problem = build_problem(cfg)
    sink = None
    if args.output:
        os.makedirs(args.output, exist_ok=True)
        sink = OutputSeries(args.output, subdivide=args.subdivide)
    settings = NewtonSettings.from_config(cfg.formulation.solver)
    log.info("%s: %d dofs, %d cells", cfg.summary(), problem.ndof, problem.mesh.num_cells)
    report = full_solve(problem, cfg.formulation.time, settings, sink=sink, probe=args.probe)
    print(f"solved: {report.summary()}")
    if args.probe is not None:
        kind = "velocity" if problem.domain == "eulerian" else "position"
        for rec, (t, val) in zip(report.steps, report.probe):
            print(f"probe step {rec.step} t={t:.12g} {kind} "
                  + " ".join(f"{v:.12g}" for v in val))
    return EXIT_OK


def cmd_mesh_gen(args):
    os.makedirs(args.output, exist_ok=True)
    mesh_path = os.path.join(args.output, "mesh.msh")
    if args.shape == "ellipsoid":
        kw = {"h": args.h, "base_z": args.base_z}
        if args.endo_axes:
            kw["endo_short"], kw["endo_long"] = args.endo_axes
        if args.epi_axes:
            kw["epi_short"], kw["epi_long"] = args.epi_axes
        spec = EllipsoidSpec(**kw)
        mesh = generate_ellipsoid(spec)
        write_gmsh(mesh, mesh_path)
        for field in helix_fibers(mesh, spec):
            write_fiber_file(os.path.join(args.output, f"{field.name}.txt"), field.vectors)
    else:
        if args.n < 1:
            raise MeshError(f"--n must be >= 1, got {args.n}")
        mesh = unit_cube(args.n) if args.shape == "cube" else unit_square(args.n)
        write_gmsh(mesh, mesh_path)
    print(f"wrote {mesh_path}: {mesh.num_vertices} vertices, {mesh.num_cells} cells, "
          f"markers {sorted(mesh.markers)}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="mechforge",
                                     description="Finite element solid and fluid mechanics.")
    parser.add_argument("--version", action="version", version=f"mechforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="solve the problem described by a JSON config")
    run.add_argument("config")
    run.add_argument("--output", "-o", help="directory for VTK files and index.txt")
    run.add_argument("--probe", type=_point, metavar="X,Y,Z",
                     help="report the vertex nearest this point at every step")
    run.add_argument("--threads", type=int, default=None,
                     help="cap BLAS/LAPACK threads")
    run.add_argument("--subdivide", action="store_true",
                     help="write P2 fields on sub-divided cells")
    run.set_defaults(func=cmd_run)

    val = sub.add_parser("validate", help="check a config (and its mesh markers)")
    val.add_argument("config")
    val.set_defaults(func=cmd_validate)

    gen = sub.add_parser("mesh-gen", help="generate a mesh (and fibers)")
    gen.add_argument("shape", choices=("ellipsoid", "cube", "square"))
    gen.add_argument("-o", "--output", required=True)
    gen.add_argument("--h", type=float, default=2000.0, help="edge length in micrometres")
    gen.add_argument("--endo-axes", type=_pair, metavar="SHORT,LONG")
    gen.add_argument("--epi-axes", type=_pair, metavar="SHORT,LONG")
    gen.add_argument("--base-z", type=float, default=5.0)
    gen.add_argument("--n", type=int, default=4, help="cells per side (cube, square)")
    gen.set_defaults(func=cmd_mesh_gen)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    _setup_logging()
    limiter = None
    if getattr(args, "threads", None):
        from threadpoolctl import threadpool_limits
        limiter = threadpool_limits(limits=args.threads)
    try:
        return args.func(args)
    except (MechforgeError, OSError) as exc:
        _report(exc)
        return _exit_code(exc)
    finally:
        if limiter is not None:
            limiter.restore_original_limits()


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
