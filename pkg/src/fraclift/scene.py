"""Scene files: schema, validation with field paths, and the batch pipeline."""

from __future__ import annotations

import shutil
import tempfile
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from . import __version__
from .distfield import (Grid, GridError, ScalarField, complement_distance_identity, distance_transform,
                        lipschitz_constant, regularized_distance)
from .export import (export_csv, export_mesh, sha256, write_json, write_occupancy)
from .lift import (BoundaryMesh, empty_interior_check, extract_lifted_boundary, hausdorff_distance,
                   lift_open_set, slice_t_zero)
from .region import (RegionError, RegionSpec, boundary_samples, bounding_box, component_count,
                     component_region, contains_points, exact_components, region_from_dict)
from .topo import (NonBijectiveError, NonWatertightError, box_counting_dimension, euler_characteristic,
                   label_components, lifted_component_bijection, mesh_component_count)

MAX_RESOLUTION = {1: 65536, 2: 1024}
MAX_CURVE_N = 4096
MAX_SURFACE_TRIANGLES = 20000


class SceneError(ValueError):
    """Validation failure tied to a dotted field path in the scene file."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class IntervalP(_Strict):
    type: Literal["interval"]
    a: float
    b: float


class CantorP(_Strict):
    type: Literal["cantor_complement"]
    depth: int = Field(ge=1, le=20)


class DiskP(_Strict):
    type: Literal["disk"]
    center: tuple[float, float]
    r: float = Field(gt=0)


class AnnulusP(_Strict):
    type: Literal["annulus"]
    center: tuple[float, float]
    r_in: float = Field(gt=0)
    r_out: float = Field(gt=0)


class BoxP(_Strict):
    type: Literal["box"]
    lo: tuple[float, float]
    hi: tuple[float, float]


Primitive = Annotated[Union[IntervalP, CantorP, DiskP, AnnulusP, BoxP], Field(discriminator="type")]


class RegionCfg(_Strict):
    dimension: Literal[1, 2]
    primitives: list[Primitive] = Field(min_length=1)


class GridCfg(_Strict):
    resolution: int = Field(ge=2)
    padding_factor: float = Field(1.0, ge=1.0)


class LiftCfg(_Strict):
    t_resolution: Optional[int] = Field(None, ge=2)
    regularize_epsilon: Optional[float] = Field(None, gt=0, lt=0.5)

    @field_validator("t_resolution")
    @classmethod
    def _even(cls, v):
        if v is not None and v % 2:
            raise ValueError("must be even so that t = 0 is a lattice node")
        return v


class ComponentsA(_Strict):
    kind: Literal["components"]


class DimensionA(_Strict):
    kind: Literal["dimension"]
    scales: list[float] = Field(min_length=2)

    @field_validator("scales")
    @classmethod
    def _positive(cls, v):
        if any(s <= 0 for s in v):
            raise ValueError("scales must be positive")
        return v


class EulerA(_Strict):
    kind: Literal["euler"]


class OperatorsA(_Strict):
    kind: Literal["operators"]
    symbol: Union[int, list[int]] = 1
    N: int = Field(256, ge=16)
    tol: Union[float, Literal["auto"]] = 1e-8
    epsilon: float = Field(0.2, gt=0, lt=0.5)
    component: Optional[int] = Field(None, ge=0)
    surface_resolution: int = Field(32, ge=8)


Analysis = Annotated[Union[ComponentsA, DimensionA, EulerA, OperatorsA], Field(discriminator="kind")]


class OutputCfg(_Strict):
    directory: str = "lift-out"
    formats: list[Literal["json", "csv", "obj", "ply", "png", "occ"]] = ["json", "csv", "obj", "png"]


class SceneConfig(_Strict):
    region: RegionCfg
    grid: GridCfg
    lift: LiftCfg = LiftCfg()
    analyses: list[Analysis] = []
    output: OutputCfg = OutputCfg()


def _loc(loc) -> str:
    # drop pydantic's union-tag segments such as "disk" or "operators"
    parts = [str(p) for p in loc if not (isinstance(p, str) and p in _TAGS)]
    return ".".join(parts)


_TAGS = {"interval", "cantor_complement", "disk", "annulus", "box",
         "components", "dimension", "euler", "operators"}


def parse_scene(data: dict) -> SceneConfig:
    try:
        cfg = SceneConfig.model_validate(data)
    except ValidationError as exc:
        err = exc.errors()[0]
        raise SceneError(_loc(err["loc"]) or "scene", err["msg"]) from None
    _check_semantics(cfg)
    return cfg


def load_scene(path) -> SceneConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise SceneError("scene", f"cannot read {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise SceneError("scene", f"not valid YAML/JSON: {exc}") from None
    if not isinstance(data, dict):
        raise SceneError("scene", "top level must be a mapping")
    return parse_scene(data)


def _check_semantics(cfg: SceneConfig) -> None:
    n = cfg.region.dimension
    for i, p in enumerate(cfg.region.primitives):
        pdim = 1 if p.type in ("interval", "cantor_complement") else 2
        if pdim != n:
            raise SceneError(f"region.primitives.{i}", f"{p.type} is {pdim}-dimensional but region.dimension is {n}")
        if p.type == "interval" and not p.a < p.b:
            raise SceneError(f"region.primitives.{i}.b", "must exceed a")
        if p.type == "annulus" and not p.r_in < p.r_out:
            raise SceneError(f"region.primitives.{i}.r_out", "must exceed r_in")
        if p.type == "box" and not all(lo < hi for lo, hi in zip(p.lo, p.hi)):
            raise SceneError(f"region.primitives.{i}.hi", "must exceed lo on every axis")
    if cfg.grid.resolution > MAX_RESOLUTION[n]:
        raise SceneError("grid.resolution", f"at most {MAX_RESOLUTION[n]} for a {n}-dimensional region")
    for i, a in enumerate(cfg.analyses):
        if a.kind == "operators":
            if n == 1 and (a.N % 2 or a.N > MAX_CURVE_N):
                raise SceneError(f"analyses.{i}.N", f"must be even and at most {MAX_CURVE_N}")
            if n == 2 and a.symbol != 1:
                raise SceneError(f"analyses.{i}.symbol", "symbols apply to curve operators only (1-D regions)")
    region = region_of(cfg)
    ncomp = component_count(region)
    for i, a in enumerate(cfg.analyses):
        if a.kind == "operators" and a.component is not None and a.component >= ncomp:
            raise SceneError(f"analyses.{i}.component", f"region has only {ncomp} components")


def region_of(cfg: SceneConfig) -> RegionSpec:
    try:
        return region_from_dict(cfg.region.model_dump())
    except RegionError as exc:
        raise SceneError("region", str(exc)) from None


# ---------------------------------------------------------------- pipeline


class Pipeline:
    """Lazily computed stages of a scene, each evaluated at most once."""

    def __init__(self, cfg: SceneConfig):
        self.cfg = cfg
        self.region = region_of(cfg)
        self._cache: dict = {}

    def _get(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def grid(self) -> Grid:
        g = self.cfg.grid
        return self._get("grid", lambda: Grid.for_region(self.region, g.resolution, g.padding_factor))

    @property
    def distance(self) -> ScalarField:
        return self._get("distance", lambda: distance_transform(self.grid, self.region))

    @property
    def height(self) -> ScalarField:
        eps = self.cfg.lift.regularize_epsilon
        if eps is None:
            return self.distance
        return self._get("height", lambda: regularized_distance(self.distance, eps))

    @property
    def indicator(self):
        return self._get("indicator", lambda: lift_open_set(
            self.region, self.distance, self.cfg.lift.t_resolution, height=self.height))

    @property
    def mesh(self) -> BoundaryMesh:
        def build():
            m = extract_lifted_boundary(self.distance, self.region, height=self.height)
            mesh_component_count(m)
            return m
        return self._get("mesh", build)


def _distance_summary(p: Pipeline) -> dict:
    return {
        "h": p.grid.h,
        "resolution": p.grid.resolution,
        "origin": list(p.grid.origin),
        "max_value": float(p.distance.values.max()),
        "lipschitz_constant": lipschitz_constant(p.distance),
        "complement_identity_deviation": complement_distance_identity(p.distance, p.region, 100),
    }


def _lift_summary(p: Pipeline) -> dict:
    ind = p.indicator
    mesh = p.mesh
    sl = slice_t_zero(mesh)
    samples = boundary_samples(p.region, p.grid.h / 2).points
    return {
        "t_max": ind.t_max,
        "t_resolution": ind.t_resolution,
        "occupied_nodes": int(ind.occupancy.sum()),
        "occupied_measure": ind.occupied_measure(),
        "boundary_node_fraction": empty_interior_check(ind),
        "mesh_vertices": int(len(mesh.vertices)),
        "mesh_cells": int(len(mesh.cells)),
        "mesh_measure": mesh.total_measure(),
        "slice_points": int(len(sl.points)),
        "slice_hausdorff": hausdorff_distance(sl.points[:, :-1], samples) if len(sl.points) else None,
        "regularize_epsilon": p.cfg.lift.regularize_epsilon,
    }


def _components(p: Pipeline, flags: list) -> dict:
    g = p.grid
    inside = contains_points(p.region, g.nodes()).reshape(g.shape)
    lu = label_components(inside)
    ll = label_components(p.indicator.occupancy)
    out = {
        "exact": component_count(p.region),
        "base": lu.component_count,
        "lifted": ll.component_count,
        "mesh": mesh_component_count(p.mesh),
    }
    try:
        mapping = lifted_component_bijection(lu, ll, p.indicator)
        out["bijection"] = True
        out["map"] = [[k, v] for k, v in mapping.items()]
    except NonBijectiveError as exc:
        out["bijection"] = False
        out["bijection_error"] = str(exc)
        flags.append("components: lifted component map is not a bijection")
    return out


def _dimension(p: Pipeline, a: DimensionA, flags: list) -> tuple[dict, dict]:
    lo, _ = bounding_box(p.region)
    scales = sorted(a.scales, reverse=True)
    E = boundary_samples(p.region, min(scales) / 4)
    fit_e = box_counting_dimension(E, scales, origin=lo)
    fit_m = box_counting_dimension(p.mesh, scales, origin=np.append(lo, 0.0))
    rep = {
        "scales": scales,
        "boundary": {"slope": fit_e.slope, "residual": fit_e.residual, "counts": fit_e.counts},
        "lifted_boundary": {"slope": fit_m.slope, "residual": fit_m.residual, "counts": fit_m.counts},
    }
    return rep, {"boundary": fit_e, "lifted_boundary": fit_m}


def _euler(p: Pipeline, flags: list) -> dict:
    mesh = p.mesh
    out = {}
    try:
        out["total"] = euler_characteristic(mesh)
        per = []
        for c in range(int(mesh.component_id.max()) + 1):
            sub = BoundaryMesh(mesh.vertices, mesh.cells[mesh.component_id == c], mesh.h)
            per.append(euler_characteristic(sub))
        out["per_component"] = per
    except NonWatertightError as exc:
        out["error"] = str(exc)
        flags.append("euler: mesh is not watertight")
    return out


def _curve_operators(p: Pipeline, a: OperatorsA, flags: list) -> tuple[dict, dict]:
    from .ops.curve import cauchy_projection_curve, fredholm_index, sample_closed_curve, SymbolSpec, toeplitz_curve

    comps = exact_components(p.region)
    if a.component is None:
        lengths = [sum(float(x.b - x.a) for x in c) for c in comps]
        ci = int(np.argmax(lengths))
    else:
        ci = a.component
    V = component_region(p.region, comps[ci])
    rho = regularized_distance(p.distance, a.epsilon)
    mesh = extract_lifted_boundary(p.distance, V, height=rho)
    curve = sample_closed_curve(mesh, a.N)
    P = cauchy_projection_curve(curve)
    Pm = P.entries
    symbols = [a.symbol] if isinstance(a.symbol, int) else list(a.symbol)
    reports, spectra = [], {}
    for k in symbols:
        op = toeplitz_curve(curve, SymbolSpec(winding_exponent=k), P)
        r = fredholm_index(op, tol=a.tol)
        d = {"symbol": f"winding {k}", **r.as_dict(), "min_modulus": op.min_modulus}
        reports.append(d)
        spectra[k] = r
        if not r.reliable:
            flags.append(f"operators: index for winding {k} has no clear spectral gap")
    rep = {
        "component": ci,
        "epsilon": a.epsilon,
        "N": a.N,
        "curve_length": curve.length,
        "idempotence_defect": float(np.linalg.norm(Pm @ Pm - Pm, 2)),
        "constant_reproduction": float(np.abs(Pm @ np.ones(a.N) - 1).max()),
        "index": reports,
    }
    return rep, {"P": P, "spectra": spectra}


def _surface_operators(p: Pipeline, a: OperatorsA, flags: list) -> tuple[dict, dict]:
    from .ops.quaternion import Quaternion
    from .ops.surface import (SurfaceError, apply, cauchy_integral_surface, hardy_projection_surface,
                              idempotence_defect, surface_from_mesh)

    comps = exact_components(p.region)
    ci = 0 if a.component is None else a.component
    V = component_region(p.region, comps[ci])
    levels = []
    P_last = None
    for res in (a.surface_resolution, 2 * a.surface_resolution):
        g = Grid.for_region(p.region, res, p.cfg.grid.padding_factor)
        d = distance_transform(g, p.region)
        rho = regularized_distance(d, a.epsilon)
        mesh = extract_lifted_boundary(d, V, height=rho, separate_sheets=True)
        if len(mesh.cells) > MAX_SURFACE_TRIANGLES:
            raise SceneError("analyses.operators.surface_resolution", "lifted surface exceeds the dense-matrix limit")
        S = surface_from_mesh(mesh)
        P = hardy_projection_surface(S)
        ones = np.tile([1.0, 0, 0, 0], (S.n, 1))
        # reproduction at the highest point of the lifted component's base slice
        nodes = g.nodes()
        inside = contains_points(V, nodes)
        j = int(np.argmax(np.where(inside, rho.values.ravel(), -1)))
        x0 = np.append(nodes[j], 0.0)
        try:
            q = cauchy_integral_surface(S, Quaternion(1, 0, 0, 0), x0)
            repro = list(q)
        except SurfaceError:
            repro = None
        levels.append({
            "resolution": res,
            "triangles": S.n,
            "constant_reproduction": float(np.abs(apply(P, ones) - ones).max()),
            "idempotence_defect": idempotence_defect(P, S),
            "interior_point": x0,
            "cauchy_unit_density": repro,
        })
        P_last = P
    ratio = levels[1]["idempotence_defect"] / levels[0]["idempotence_defect"]
    if not ratio < 1:
        flags.append("operators: surface idempotence defect did not decrease under refinement")
    return {"component": ci, "epsilon": a.epsilon, "levels": levels, "refinement_ratio": ratio}, {"P": P_last}


def run_pipeline(cfg: SceneConfig):
    """Evaluate every requested analysis; returns (report, artifacts, flags)."""
    p = Pipeline(cfg)
    flags: list[str] = []
    report: dict = {
        "version": __version__,
        "region": cfg.region.model_dump(),
        "distance": _distance_summary(p),
        "lift": _lift_summary(p),
    }
    artifacts: dict = {"pipeline": p, "fits": {}, "operators": {}}
    for i, a in enumerate(cfg.analyses):
        key = f"{i}_{a.kind}"
        if a.kind == "components":
            report[key] = _components(p, flags)
        elif a.kind == "dimension":
            report[key], artifacts["fits"][key] = _dimension(p, a, flags)
        elif a.kind == "euler":
            report[key] = _euler(p, flags)
        elif a.kind == "operators":
            fn = _curve_operators if cfg.region.dimension == 1 else _surface_operators
            report[key], artifacts["operators"][key] = fn(p, a, flags)
    report["flags"] = flags
    return report, artifacts, flags


def _write_outputs(cfg: SceneConfig, report: dict, artifacts: dict, out: Path) -> list[Path]:
    from . import plotting

    p: Pipeline = artifacts["pipeline"]
    fmts = set(cfg.output.formats)
    written = [write_json(report, out / "report.json")]
    if "csv" in fmts:
        written.append(export_csv(p.distance, out / "distance.csv"))
        for key, fits in artifacts["fits"].items():
            for name, fit in fits.items():
                written.append(export_csv(fit, out / f"fit_{key}_{name}.csv"))
        for key, ops in artifacts["operators"].items():
            written.append(export_csv(ops["P"], out / f"projection_{key}.csv"))
    for fmt in ("obj", "ply"):
        if fmt in fmts:
            written.append(export_mesh(p.mesh, fmt, out / f"lifted_boundary.{fmt}"))
    if "occ" in fmts:
        written.append(write_occupancy(p.indicator, out / "occupancy.ulift"))
    if "png" in fmts:
        written.append(plotting.plot_field(p.distance, out / "distance.png"))
        written.append(plotting.plot_mesh(p.mesh, out / "lifted_boundary.png"))
        for key, fits in artifacts["fits"].items():
            for name, fit in fits.items():
                written.append(plotting.plot_dimension_fit(fit, out / f"fit_{key}_{name}.png", name))
        for key, ops in artifacts["operators"].items():
            for k, r in ops.get("spectra", {}).items():
                written.append(plotting.plot_singular_values(
                    r.spectrum, r.threshold, out / f"spectrum_{key}_w{k}.png", f"winding {k}"))
    return written


def write_manifest(paths: list[Path], out: Path) -> Path:
    entries = {str(q.relative_to(out)): {"sha256": sha256(q), "bytes": q.stat().st_size}
               for q in sorted(paths)}
    return write_json({"version": __version__, "artifacts": entries}, out / "manifest.json")


def run_scene(path, out_dir: Optional[str] = None) -> int:
    """Run a scene file end to end; returns 0, or 3 when a numerical flag was raised.

    Artifacts are staged in a temporary directory and moved into place only
    after every analysis succeeded, so a failure leaves no partial output.
    """
    cfg = load_scene(path)
    out = Path(out_dir or cfg.output.directory)
    report, artifacts, flags = run_pipeline(cfg)
    out.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix=".staging-", dir=out))
    try:
        written = _write_outputs(cfg, report, artifacts, stage)
        write_manifest(written, stage)
        for q in sorted(stage.iterdir()):
            q.replace(out / q.name)
    finally:
        shutil.rmtree(stage, ignore_errors=True)
    return 3 if flags else 0


def export_only(path, what: str, out_dir: Optional[str] = None) -> list[Path]:
    cfg = load_scene(path)
    out = Path(out_dir or cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    p = Pipeline(cfg)
    if what == "field":
        return [export_csv(p.distance, out / "distance.csv")]
    fmts = [f for f in cfg.output.formats if f in ("obj", "ply")] or ["obj"]
    return [export_mesh(p.mesh, f, out / f"lifted_boundary.{f}") for f in fmts]


__all__ = ["SceneConfig", "SceneError", "load_scene", "parse_scene", "run_pipeline", "run_scene",
           "export_only", "GridError"]
