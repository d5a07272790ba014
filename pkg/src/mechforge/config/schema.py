"""Problem definition: JSON document -> validated, immutable ProblemConfig.

Key names and nesting follow the dictionary layout used by the original
Python package (``material`` / ``mesh`` / ``formulation``), so an existing
config dictionary transcribes to JSON one-to-one.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Mapping, Optional, Tuple

from ..errors import (ConfigSyntaxError, InvalidCombination, InvalidValue,
                      MissingKey, UnknownKey, UnknownRegion)
from .expression import ScalarExpression, parse_expression

ELASTIC_MODELS = ("linear_iso", "neo_hooke", "demiray", "fung", "guccione",
                  "holzapfel_ogden")
VISCOUS_MODELS = ("newtonian",)
ANISOTROPIC_MODELS = ("fung", "guccione", "holzapfel_ogden")
ELEMENTS = ("p1", "p2", "p2-p1", "p1-p1")
MIXED_ELEMENTS = ("p2-p1", "p1-p1")

# (required, optional) parameter keys per model; "kappa" is added to the
# required set for compressible nonlinear solids.
MODEL_PARAMS = {
    "linear_iso": (("mu", "la"), ()),
    "neo_hooke": (("mu",), ()),
    "demiray": (("a", "b"), ()),
    "fung": (("C", "coefficients"), ()),
    "guccione": (("C", "bf", "bt", "bfs"), ()),
    "holzapfel_ogden": (("a", "b", "a_f", "b_f"),
                        ("a_s", "b_s", "a_fs", "b_fs")),
    "newtonian": (("mu",), ()),
}

NEUMANN_TYPES = ("pressure", "traction")
LINEAR_SOLVERS = ("lu", "gmres-ilu")


@dataclass(frozen=True)
class FiberSpec:
    fiber_files: Tuple[str, ...]
    fiber_names: Tuple[str, ...]
    elementwise: bool = True


@dataclass(frozen=True)
class MaterialConfig:
    const_eqn: str
    type: str
    incompressible: bool
    density: float = 0.0
    params: Mapping[str, Any] = field(default_factory=lambda: MappingProxyType({}))
    fibers: Optional[FiberSpec] = None

    @property
    def anisotropic(self):
        return self.const_eqn in ANISOTROPIC_MODELS


@dataclass(frozen=True)
class MeshConfig:
    mesh_file: Optional[str] = None
    boundaries: Optional[str] = None
    generate: Optional[Mapping[str, Any]] = None


@dataclass(frozen=True)
class TimeParams:
    dt: float
    interval: Tuple[float, float]
    theta: float = 1.0
    newmark_beta: float = 0.25
    newmark_gamma: float = 0.5

    @property
    def num_steps(self):
        return int(round((self.interval[1] - self.interval[0]) / self.dt))


@dataclass(frozen=True)
class DirichletBC:
    """One constrained region.

    ``values`` is a tuple of per-component expressions for vector fields
    (``None`` leaves that component free) or a single expression for
    ``field == "pressure"``.
    """

    field: str
    region: int
    values: Any


@dataclass(frozen=True)
class NeumannBC:
    region: int
    type: str
    values: Any  # ScalarExpression (pressure) or tuple of them (traction)


@dataclass(frozen=True)
class BoundaryConditions:
    dirichlet: Tuple[DirichletBC, ...] = ()
    neumann: Tuple[NeumannBC, ...] = ()

    @property
    def regions(self):
        return {bc.region for bc in self.dirichlet} | {bc.region for bc in self.neumann}


@dataclass(frozen=True)
class NewtonConfig:
    max_iters: int = 50
    abs_tol: float = 1e-9
    rel_tol: float = 1e-10
    max_halvings: int = 4


@dataclass(frozen=True)
class SolverConfig:
    newton: NewtonConfig = NewtonConfig()
    linear_solver: str = "lu"


@dataclass(frozen=True)
class FormulationConfig:
    element: str
    domain: str
    time: Optional[TimeParams] = None
    bcs: BoundaryConditions = BoundaryConditions()
    body_force: Optional[Tuple[ScalarExpression, ...]] = None
    quadrature_degree: Optional[int] = None
    solver: SolverConfig = SolverConfig()

    @property
    def steady(self):
        return self.time is None

    @property
    def mixed(self):
        return self.element in MIXED_ELEMENTS


@dataclass(frozen=True)
class ProblemConfig:
    material: MaterialConfig
    mesh: MeshConfig
    formulation: FormulationConfig
    base_dir: str = field(default=".", compare=False)

    def summary(self):
        f = self.formulation
        steps = "steady" if f.steady else f"{f.time.num_steps} steps"
        return f"{self.material.const_eqn}, {f.domain}, {f.element}, {steps}"


# -- helpers -------------------------------------------------------------------

def _check_keys(section, allowed, path):
    if not isinstance(section, dict):
        raise ConfigSyntaxError(f"{path or 'document'} must be an object")
    for key in section:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise UnknownKey(f"unknown key {where!r}")


def _require(section, key, path):
    if key not in section:
        raise MissingKey(f"missing required key '{path}.{key}'")
    return section[key]


def _number(value, path, *, positive=False, nonneg=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidValue(f"{path} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise InvalidValue(f"{path} must be finite")
    if positive and value <= 0:
        raise InvalidValue(f"{path} must be > 0, got {value}")
    if nonneg and value < 0:
        raise InvalidValue(f"{path} must be >= 0, got {value}")
    return value


def _bool(value, path):
    if not isinstance(value, bool):
        raise InvalidValue(f"{path} must be true/false, got {value!r}")
    return value


def _region_list(value, path):
    if not isinstance(value, list) or not all(
            isinstance(r, int) and not isinstance(r, bool) for r in value):
        raise InvalidValue(f"{path} must be a list of integers")
    return value


def _vector_expr(value, path, allow_free=False):
    if not isinstance(value, list) or len(value) not in (2, 3):
        raise InvalidValue(f"{path} must be a list of 2 or 3 components")
    out = []
    for comp in value:
        if comp is None and allow_free:
            out.append(None)
        else:
            out.append(parse_expression(comp))
    return tuple(out)


# -- sections ------------------------------------------------------------------

def _parse_material(d):
    base = ("const_eqn", "type", "incompressible", "density", "fibers")
    const_eqn = _require(d, "const_eqn", "material")
    if const_eqn not in MODEL_PARAMS:
        raise InvalidValue(f"material.const_eqn: unknown model {const_eqn!r}")
    required, optional = MODEL_PARAMS[const_eqn]
    mtype = _require(d, "type", "material")
    if mtype not in ("elastic", "viscous"):
        raise InvalidValue(f"material.type must be 'elastic' or 'viscous', got {mtype!r}")
    incompressible = _bool(d.get("incompressible", False), "material.incompressible")
    extra = ("kappa",) if const_eqn not in ("linear_iso", "newtonian") else ()
    _check_keys(d, base + required + optional + extra, "material")

    if mtype == "viscous" and not incompressible:
        raise InvalidCombination("type=viscous requires incompressible=true")
    if mtype == "elastic" and const_eqn not in ELASTIC_MODELS:
        raise InvalidCombination(f"type=elastic is incompatible with const_eqn={const_eqn}")
    if mtype == "viscous" and const_eqn not in VISCOUS_MODELS:
        raise InvalidCombination(f"type=viscous is incompatible with const_eqn={const_eqn}")

    density = _number(d.get("density", 0.0), "material.density", nonneg=True)

    params = {}
    needed = list(required)
    if mtype == "elastic" and not incompressible and const_eqn != "linear_iso":
        needed.append("kappa")
    if const_eqn == "linear_iso" and incompressible:
        needed.remove("la")
    for key in needed:
        if key not in d:
            raise MissingKey(f"missing required key 'material.{key}' for {const_eqn}"
                             + ("" if key != "kappa" else " (compressible)"))
    for key in required + optional + extra:
        if key not in d:
            continue
        if key == "coefficients":
            params[key] = _fung_matrix(d[key])
            continue
        params[key] = _number(d[key], f"material.{key}")
    if "kappa" in params and incompressible:
        raise InvalidCombination("material.kappa given for incompressible=true")
    _check_param_values(const_eqn, params)

    fibers = None
    if "fibers" in d:
        f = d["fibers"]
        _check_keys(f, ("fiber_files", "fiber_names", "elementwise"), "material.fibers")
        files = _require(f, "fiber_files", "material.fibers")
        names = _require(f, "fiber_names", "material.fibers")
        if not (isinstance(files, list) and all(isinstance(s, str) for s in files)):
            raise InvalidValue("material.fibers.fiber_files must be a list of paths")
        if not (isinstance(names, list) and all(isinstance(s, str) for s in names)):
            raise InvalidValue("material.fibers.fiber_names must be a list of names")
        if len(files) != len(names):
            raise InvalidCombination(
                f"material.fibers.fiber_files has {len(files)} entries but "
                f"material.fibers.fiber_names has {len(names)}")
        fibers = FiberSpec(tuple(files), tuple(names),
                           _bool(f.get("elementwise", True), "material.fibers.elementwise"))
    if const_eqn in ANISOTROPIC_MODELS:
        if fibers is None:
            raise InvalidCombination(f"const_eqn={const_eqn} requires material.fibers")
        if len(fibers.fiber_files) < 2:
            raise InvalidCombination(
                f"const_eqn={const_eqn} requires fiber and sheet fields "
                f"(material.fibers.fiber_files needs 2 entries)")
    return MaterialConfig(const_eqn, mtype, incompressible, density,
                          MappingProxyType(params), fibers)


def _fung_matrix(value):
    if (not isinstance(value, list) or len(value) != 6
            or not all(isinstance(r, list) and len(r) == 6 for r in value)):
        raise InvalidValue("material.coefficients must be a 6x6 nested list")
    rows = tuple(tuple(_number(v, "material.coefficients") for v in r) for r in value)
    for i in range(6):
        for j in range(i):
            if rows[i][j] != rows[j][i]:
                raise InvalidValue("material.coefficients must be symmetric")
    return rows


def _check_param_values(model, p):
    def pos(*keys):
        for k in keys:
            if k in p and p[k] <= 0:
                raise InvalidValue(f"material.{k} must be > 0 for {model}")

    def nonneg(*keys):
        for k in keys:
            if k in p and p[k] < 0:
                raise InvalidValue(f"material.{k} must be >= 0 for {model}")

    pos("mu", "kappa")
    if model == "demiray":
        pos("a", "b")
    elif model in ("fung", "guccione"):
        pos("C")
        nonneg("bf", "bt", "bfs")
    elif model == "holzapfel_ogden":
        nonneg("a", "a_f", "a_s", "a_fs")
        pos("b", "b_f", "b_s", "b_fs")


def _parse_mesh(d):
    _check_keys(d, ("mesh_file", "boundaries", "generate"), "mesh")
    has_file = "mesh_file" in d
    has_gen = "generate" in d
    if has_file == has_gen:
        raise InvalidCombination("mesh needs exactly one of mesh.mesh_file or mesh.generate")
    if has_file and not isinstance(d["mesh_file"], str):
        raise InvalidValue("mesh.mesh_file must be a path")
    if "boundaries" in d and not isinstance(d["boundaries"], str):
        raise InvalidValue("mesh.boundaries must be a path")
    if has_gen and "boundaries" in d:
        raise InvalidCombination("mesh.boundaries cannot be combined with mesh.generate")
    gen = None
    if has_gen:
        g = d["generate"]
        if not isinstance(g, dict):
            raise InvalidValue("mesh.generate must be an object")
        shape = _require(g, "shape", "mesh.generate")
        allowed = {
            "ellipsoid": ("shape", "h", "endo_axes", "epi_axes", "base_z"),
            "cube": ("shape", "n"),
            "square": ("shape", "n"),
            "box": ("shape", "n", "size"),
            "rectangle": ("shape", "n", "size"),
        }
        if shape not in allowed:
            raise InvalidValue(f"mesh.generate.shape: unknown shape {shape!r}")
        _check_keys(g, allowed[shape], "mesh.generate")
        gen = MappingProxyType({k: (tuple(v) if isinstance(v, list) else v)
                                for k, v in g.items()})
    return MeshConfig(d.get("mesh_file"), d.get("boundaries"), gen)


def _parse_time(d):
    _check_keys(d, ("dt", "interval", "theta", "newmark_beta", "newmark_gamma"),
                "formulation.time")
    dt = _number(_require(d, "dt", "formulation.time"), "formulation.time.dt", positive=True)
    interval = _require(d, "interval", "formulation.time")
    if not isinstance(interval, list) or len(interval) != 2:
        raise InvalidValue("formulation.time.interval must be [t0, t1]")
    t0, t1 = (_number(v, "formulation.time.interval") for v in interval)
    if t1 <= t0:
        raise InvalidValue("formulation.time.interval requires t1 > t0")
    steps = (t1 - t0) / dt
    if abs(steps - round(steps)) > 1e-9 * max(1.0, steps) or round(steps) < 1:
        raise InvalidValue(
            f"formulation.time: interval length {t1 - t0} is not a positive "
            f"integer multiple of dt={dt}")
    theta = _number(d.get("theta", 1.0), "formulation.time.theta")
    if not 0.0 <= theta <= 1.0:
        raise InvalidValue("formulation.time.theta must lie in [0, 1]")
    beta = _number(d.get("newmark_beta", 0.25), "formulation.time.newmark_beta")
    gamma = _number(d.get("newmark_gamma", 0.5), "formulation.time.newmark_gamma")
    if not 0.0 < beta <= 0.5:
        raise InvalidValue("formulation.time.newmark_beta must lie in (0, 0.5]")
    if not 0.5 <= gamma <= 1.0:
        raise InvalidValue("formulation.time.newmark_gamma must lie in [0.5, 1]")
    return TimeParams(dt, (t0, t1), theta, beta, gamma)


def _parse_dirichlet(d, material):
    path = "formulation.bcs.dirichlet"
    _check_keys(d, ("displacement", "velocity", "pressure", "regions", "p_regions"), path)
    primary = "displacement" if material.type == "elastic" else "velocity"
    wrong = "velocity" if primary == "displacement" else "displacement"
    if wrong in d:
        raise InvalidCombination(
            f"{path}.{wrong} is not valid for material.type={material.type}")
    out = []
    if primary in d or "regions" in d:
        values = _require(d, primary, path)
        regions = _region_list(_require(d, "regions", path), f"{path}.regions")
        if not isinstance(values, list) or len(values) != len(regions):
            raise InvalidCombination(
                f"{path}.{primary} has {len(values) if isinstance(values, list) else 'no'} "
                f"entries but {path}.regions has {len(regions)}")
        for region, value in zip(regions, values):
            out.append(DirichletBC(primary, region,
                                   _vector_expr(value, f"{path}.{primary}", allow_free=True)))
    if "pressure" in d or "p_regions" in d:
        values = _require(d, "pressure", path)
        regions = _region_list(_require(d, "p_regions", path), f"{path}.p_regions")
        if not isinstance(values, list) or len(values) != len(regions):
            raise InvalidCombination(
                f"{path}.pressure and {path}.p_regions differ in length")
        for region, value in zip(regions, values):
            out.append(DirichletBC("pressure", region, parse_expression(value)))
    return tuple(out)


def _parse_neumann(d):
    path = "formulation.bcs.neumann"
    _check_keys(d, ("regions", "types", "values"), path)
    regions = _region_list(_require(d, "regions", path), f"{path}.regions")
    types = _require(d, "types", path)
    values = _require(d, "values", path)
    if not isinstance(types, list) or not isinstance(values, list):
        raise InvalidValue(f"{path}.types and {path}.values must be lists")
    if not len(regions) == len(types) == len(values):
        raise InvalidCombination(
            f"{path}.regions ({len(regions)}), {path}.types ({len(types)}) and "
            f"{path}.values ({len(values)}) must have equal length")
    out = []
    for region, kind, value in zip(regions, types, values):
        if kind not in NEUMANN_TYPES:
            raise InvalidValue(f"{path}.types: unknown type {kind!r}")
        if kind == "pressure":
            out.append(NeumannBC(region, kind, parse_expression(value)))
        else:
            out.append(NeumannBC(region, kind, _vector_expr(value, f"{path}.values")))
    return tuple(out)


def _parse_solver(d):
    _check_keys(d, ("newton", "linear_solver"), "formulation.solver")
    newton = NewtonConfig()
    if "newton" in d:
        n = d["newton"]
        _check_keys(n, ("max_iters", "abs_tol", "rel_tol", "max_halvings"),
                    "formulation.solver.newton")
        max_iters = n.get("max_iters", newton.max_iters)
        halvings = n.get("max_halvings", newton.max_halvings)
        for name, val, lo in (("max_iters", max_iters, 1), ("max_halvings", halvings, 0)):
            if not isinstance(val, int) or isinstance(val, bool) or val < lo:
                raise InvalidValue(f"formulation.solver.newton.{name} must be an integer >= {lo}")
        newton = NewtonConfig(
            max_iters,
            _number(n.get("abs_tol", newton.abs_tol), "formulation.solver.newton.abs_tol",
                    positive=True),
            _number(n.get("rel_tol", newton.rel_tol), "formulation.solver.newton.rel_tol",
                    positive=True),
            halvings)
    linear = d.get("linear_solver", "lu")
    if linear not in LINEAR_SOLVERS:
        raise InvalidValue(f"formulation.solver.linear_solver must be one of {LINEAR_SOLVERS}")
    return SolverConfig(newton, linear)


def _parse_formulation(d, material):
    path = "formulation"
    _check_keys(d, ("time", "element", "domain", "bcs", "body_force",
                    "quadrature_degree", "solver"), path)
    element = _require(d, "element", path)
    if element not in ELEMENTS:
        raise InvalidValue(f"formulation.element: unknown element {element!r}")
    domain = _require(d, "domain", path)
    if domain not in ("lagrangian", "eulerian"):
        raise InvalidValue(f"formulation.domain: unknown domain {domain!r}")

    if element == "p1-p1":
        raise InvalidCombination(
            "formulation.element=p1-p1 is an equal-order mixed pair, not inf-sup "
            "stable without stabilization; use p2-p1")
    if material.incompressible and element not in MIXED_ELEMENTS:
        raise InvalidCombination(
            f"material.incompressible=true requires a mixed element, "
            f"got formulation.element={element}")
    if not material.incompressible and element in MIXED_ELEMENTS:
        raise InvalidCombination(
            f"material.incompressible=false requires a single-field element, "
            f"got formulation.element={element}")
    if (domain == "lagrangian") != (material.type == "elastic"):
        raise InvalidCombination(
            f"formulation.domain={domain} is incompatible with material.type={material.type}")

    time = _parse_time(d["time"]) if "time" in d else None
    bcs = BoundaryConditions()
    if "bcs" in d:
        b = d["bcs"]
        _check_keys(b, ("dirichlet", "neumann"), "formulation.bcs")
        dirichlet = _parse_dirichlet(b["dirichlet"], material) if "dirichlet" in b else ()
        neumann = _parse_neumann(b["neumann"]) if "neumann" in b else ()
        bcs = BoundaryConditions(dirichlet, neumann)
        if any(bc.field == "pressure" for bc in dirichlet) and not material.incompressible:
            raise InvalidCombination(
                "formulation.bcs.dirichlet.pressure requires material.incompressible=true")
    body = _vector_expr(d["body_force"], "formulation.body_force") if "body_force" in d else None
    qdeg = d.get("quadrature_degree")
    if qdeg is not None and (not isinstance(qdeg, int) or isinstance(qdeg, bool)
                             or not 1 <= qdeg <= 6):
        raise InvalidValue("formulation.quadrature_degree must be an integer in [1, 6]")
    solver = _parse_solver(d["solver"]) if "solver" in d else SolverConfig()
    return FormulationConfig(element, domain, time, bcs, body, qdeg, solver)


# -- public API ----------------------------------------------------------------

def parse_config(document, base_dir="."):
    """Build a ProblemConfig from a JSON string/bytes or an already-decoded dict."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigSyntaxError(f"malformed JSON: {exc}") from None
    _check_keys(document, ("material", "mesh", "formulation"), "")
    for key in ("material", "mesh", "formulation"):
        if key not in document:
            raise MissingKey(f"missing top-level section {key!r}")
        if not isinstance(document[key], dict):
            raise ConfigSyntaxError(f"section {key!r} must be an object")
    material = _parse_material(document["material"])
    mesh = _parse_mesh(document["mesh"])
    formulation = _parse_formulation(document["formulation"], material)
    return ProblemConfig(material, mesh, formulation, base_dir=str(base_dir))


def _reject_duplicates(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise ConfigSyntaxError(f"duplicate key {key!r}")
        seen[key] = value
    return seen


def load_config(path):
    """Read a JSON config file; relative paths inside resolve against its folder."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigSyntaxError(f"malformed JSON in {path}: {exc}") from None
    return parse_config(doc, base_dir=os.path.dirname(os.path.abspath(path)))


def validate_against_mesh(cfg, markers, dim=None):
    """Check every boundary-condition region against the mesh's facet markers."""
    markers = set(int(m) for m in markers)
    bcs = cfg.formulation.bcs
    for bc in list(bcs.dirichlet) + list(bcs.neumann):
        if bc.region not in markers:
            raise UnknownRegion(bc.region, markers)
    if dim is None:
        return
    vectors = [bc.values for bc in bcs.dirichlet if bc.field != "pressure"]
    vectors += [bc.values for bc in bcs.neumann if bc.type == "traction"]
    if cfg.formulation.body_force is not None:
        vectors.append(cfg.formulation.body_force)
    for vec in vectors:
        if len(vec) != dim:
            raise InvalidCombination(
                f"vector boundary value has {len(vec)} components but mesh is {dim}D")


def _expr_out(e):
    return None if e is None else str(e)


def dump_config(cfg):
    """Inverse of parse_config: a JSON-compatible dict that re-parses to ``cfg``."""
    m = cfg.material
    mat = {"const_eqn": m.const_eqn, "type": m.type,
           "incompressible": m.incompressible, "density": m.density}
    for key, value in m.params.items():
        mat[key] = [list(r) for r in value] if key == "coefficients" else value
    if m.fibers is not None:
        mat["fibers"] = {"fiber_files": list(m.fibers.fiber_files),
                         "fiber_names": list(m.fibers.fiber_names),
                         "elementwise": m.fibers.elementwise}
    mesh = {}
    if cfg.mesh.mesh_file is not None:
        mesh["mesh_file"] = cfg.mesh.mesh_file
    if cfg.mesh.boundaries is not None:
        mesh["boundaries"] = cfg.mesh.boundaries
    if cfg.mesh.generate is not None:
        mesh["generate"] = {k: (list(v) if isinstance(v, tuple) else v)
                            for k, v in cfg.mesh.generate.items()}
    f = cfg.formulation
    form = {"element": f.element, "domain": f.domain}
    if f.time is not None:
        form["time"] = {"dt": f.time.dt, "interval": list(f.time.interval),
                        "theta": f.time.theta, "newmark_beta": f.time.newmark_beta,
                        "newmark_gamma": f.time.newmark_gamma}
    dirichlet = {}
    for bc in f.bcs.dirichlet:
        if bc.field == "pressure":
            dirichlet.setdefault("pressure", []).append(str(bc.values))
            dirichlet.setdefault("p_regions", []).append(bc.region)
        else:
            dirichlet.setdefault(bc.field, []).append([_expr_out(v) for v in bc.values])
            dirichlet.setdefault("regions", []).append(bc.region)
    bcs = {}
    if dirichlet:
        bcs["dirichlet"] = dirichlet
    if f.bcs.neumann:
        bcs["neumann"] = {
            "regions": [bc.region for bc in f.bcs.neumann],
            "types": [bc.type for bc in f.bcs.neumann],
            "values": [str(bc.values) if bc.type == "pressure"
                       else [str(v) for v in bc.values] for bc in f.bcs.neumann]}
    if bcs:
        form["bcs"] = bcs
    if f.body_force is not None:
        form["body_force"] = [str(v) for v in f.body_force]
    if f.quadrature_degree is not None:
        form["quadrature_degree"] = f.quadrature_degree
    n = f.solver.newton
    form["solver"] = {"newton": {"max_iters": n.max_iters, "abs_tol": n.abs_tol,
                                 "rel_tol": n.rel_tol, "max_halvings": n.max_halvings},
                      "linear_solver": f.solver.linear_solver}
    return {"material": mat, "mesh": mesh, "formulation": form}
